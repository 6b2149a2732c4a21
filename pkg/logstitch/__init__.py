"""logstitch: system models from component logs by projection, inference and stitching."""

__version__ = "0.1.0"
