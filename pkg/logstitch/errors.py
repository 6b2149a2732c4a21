"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class LogStitchError(Exception):
    """Base class for every error raised on purpose by logstitch."""


class ConfigError(LogStitchError):
    pass


class LogParseError(LogStitchError):
    """Malformed structured-log input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        self.message = message
        super().__init__(f"{prefix}{message}")

    def __reduce__(self):
        return (self.__class__, (self.message, self.line))


class UnknownComponentError(LogStitchError):
    def __init__(self, component: str):
        self.component = component
        super().__init__(f"unknown component: {component!r}")

    def __reduce__(self):
        return (self.__class__, (self.component,))


class EmptyLogError(LogStitchError):
    pass


class MutationError(LogStitchError):
    pass


class ModelError(LogStitchError):
    """A Gfsm violates one of its structural invariants."""


class NondeterministicModelError(ModelError):
    pass


class InferenceError(LogStitchError):
    def __init__(self, component: str, message: str):
        self.message = message
        self.component = component
        super().__init__(f"inference failed for component {component!r}: {message}")

    def __reduce__(self):
        return (self.__class__, (self.component, self.message))


class SliceError(LogStitchError):
    """The component model cannot read the next entry of a partition part."""

    def __init__(self, component: str, state: int, entry: object):
        self.component = component
        self.state = state
        self.entry = entry
        super().__init__(
            f"slice failure: component {component!r} has no enabled transition "
            f"from state {state} for entry {entry}"
        )

    def __reduce__(self):
        return (self.__class__, (self.component, self.state, self.entry))


class StitchError(LogStitchError):
    pass


class EvaluationError(LogStitchError):
    pass


class GeneratorError(LogStitchError):
    pass
