"""Default prompt templates for the planner."""
