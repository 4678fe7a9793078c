"""Configuration and run metrics."""
