class ConfigurationError(ValueError):
    """A physical or run parameter is outside its valid range."""


class ConfigFileError(ConfigurationError):
    """Config text could not be parsed; carries the offending line number."""

    def __init__(self, message, line_no=None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
