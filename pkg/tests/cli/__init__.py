"""Command line, sessions, serialization and reports."""
