"""Oracle-driven geometric learning."""
