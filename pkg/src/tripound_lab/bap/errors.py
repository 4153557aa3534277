class BapError(Exception):
    pass


class BapSyntaxError(BapError):
    def __init__(self, message: str, line: int, col: int):
        self.line, self.col = line, col
        super().__init__(f"{line}:{col}: {message}")


class UndefinedOperator(BapError):
    pass


class UndefinedMatrix(BapError):
    pass


class BapRuntimeError(BapError):
    pass


class StepCapExceeded(BapRuntimeError):
    pass


class IndexOutOfBounds(BapRuntimeError):
    pass
