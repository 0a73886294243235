"""Shared configuration, logging, exceptions and utilities."""
