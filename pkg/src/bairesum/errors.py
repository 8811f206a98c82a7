"""Exception hierarchy shared by every module of the package."""


class BaireSumError(Exception):
    """Base class for all errors raised by bairesum."""


class TreeError(BaireSumError, ValueError):
    pass


class CycleDetected(TreeError):
    pass


class DanglingParent(TreeError):
    pass


class InvalidTree(TreeError):
    pass


class NotAChain(BaireSumError, ValueError):
    pass


class NotASegment(BaireSumError, ValueError):
    pass


class BudgetExceeded(BaireSumError):
    def __init__(self, count, budget):
        super().__init__(f"{count} families exceed the budget of {budget}")
        self.count = count
        self.budget = budget


class InvalidParameter(BaireSumError, ValueError):
    pass


class AccumulatorMissing(BaireSumError):
    pass


class EmptyVector(BaireSumError, ValueError):
    pass


class NotNormalized(BaireSumError):
    def __init__(self, index, detail=""):
        msg = f"vector {index} is not normalized"
        super().__init__(f"{msg}: {detail}" if detail else msg)
        self.index = index


class NotBlock(BaireSumError):
    def __init__(self, first, second, detail=""):
        msg = f"vectors {first} and {second} do not have successive ranges"
        super().__init__(f"{msg}: {detail}" if detail else msg)
        self.pair = (first, second)


class InfeasibleRequest(BaireSumError):
    pass


class TreeTooSmall(InfeasibleRequest):
    """The tree cannot host the requested construction.

    ``required`` carries whatever the construction knows about what would be
    needed (depth, antichain width, support sizes).
    """

    def __init__(self, message, **required):
        super().__init__(message)
        self.required = required


class ParseError(BaireSumError):
    def __init__(self, source, field, detail):
        super().__init__(f"{source}: {field}: {detail}")
        self.source = source
        self.field = field
