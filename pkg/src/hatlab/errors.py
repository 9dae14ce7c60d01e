"""Exception hierarchy shared by all hatlab modules."""


class HatlabError(Exception):
    pass


class CycleSyntaxError(HatlabError, ValueError):
    pass


class RepeatedElement(CycleSyntaxError):
    pass


class OutOfRange(CycleSyntaxError):
    pass


class Malformed(CycleSyntaxError):
    pass


class DegreeMismatch(HatlabError, ValueError):
    pass


class ActionEscapesTuple(HatlabError, ValueError):
    pass


class InvalidAssignment(HatlabError, ValueError):
    pass


class ParamMismatch(HatlabError, ValueError):
    pass


class GhostMismatch(HatlabError, ValueError):
    pass


class SetFileError(HatlabError, ValueError):
    pass


class UndefinedStrategy(HatlabError, ValueError):
    pass


class NotPerfect(HatlabError, ValueError):
    pass


class InvalidSystem(HatlabError, ValueError):
    pass


class UnsupportedOrder(HatlabError, ValueError):
    pass


class OddK(HatlabError, ValueError):
    pass


class TooLarge(HatlabError, ValueError):
    pass


class NotIndependent(HatlabError, ValueError):
    pass
