class InputError(ValueError):
    """Invalid caller-supplied data (bad ids, malformed files, impossible requests)."""
