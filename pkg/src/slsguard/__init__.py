"""Least-privilege permission extraction, policy generation, and runtime
allowlist enforcement for serverless functions."""

__version__ = "0.1.0"
