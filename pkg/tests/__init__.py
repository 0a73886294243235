"""Tests for the amenable fixed-point toolkit."""
