"""Utility scripts."""

