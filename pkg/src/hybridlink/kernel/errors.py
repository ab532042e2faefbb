class KernelError(Exception):
    """Base for every failure raised while parsing or evaluating a command."""


class CommandSyntaxError(KernelError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class EvalError(KernelError):
    """Unbound names, unknown functions, arity and domain failures."""


class UnboundNameError(EvalError):
    pass


class DimensionError(KernelError):
    """Shape or value-type mismatch."""
