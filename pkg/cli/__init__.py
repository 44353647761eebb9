"""Command-line interface for the MQNE toolkit."""
