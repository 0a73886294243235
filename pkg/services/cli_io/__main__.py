from services.cli_io.app import main

if __name__ == "__main__":
    main()
