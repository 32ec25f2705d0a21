"""Default pattern files for the coordinator's rule cascade."""
