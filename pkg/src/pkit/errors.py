"""Exception hierarchy shared by every module.

Each error carries enough structured data for the CLI to render a JSON
report; ``payload()`` returns that data.
"""


class PkitError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for it."""

    exit_code = 2

    def payload(self):
        return {"error": type(self).__name__, "message": str(self)}


class AntisymmetryViolation(PkitError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("relation has a cycle: " + " < ".join(map(str, self.cycle)))

    def payload(self):
        d = super().payload()
        d["cycle"] = [str(c) for c in self.cycle]
        return d


class UnknownElement(PkitError):
    pass


class SizeLimit(PkitError):
    pass


class NotALattice(PkitError):
    pass


class NotDistributive(PkitError):
    def __init__(self, message, sublattice=None):
        self.sublattice = sublattice
        super().__init__(message)


class NotIdeal(PkitError):
    pass


class NotFilter(PkitError):
    pass


class UnknownPart(PkitError):
    pass


class ArityMismatch(PkitError):
    pass


class FragmentViolation(PkitError):
    pass


class UnknownAtom(PkitError):
    pass


class NotClosedDownset(PkitError):
    pass


class NotClosedUpset(PkitError):
    pass


class AxiomFailure(PkitError):
    """A presentation is not a Priestley space; ``points`` is a counterexample."""

    def __init__(self, axiom, message, points=()):
        self.axiom = axiom
        self.points = [str(p) for p in points]
        super().__init__(f"{axiom}: {message}")

    def payload(self):
        d = super().payload()
        d["axiom"] = self.axiom
        d["points"] = self.points
        return d


class NotExpressible(PkitError):
    exit_code = 3


class ValidationInconclusive(PkitError):
    exit_code = 3


class SearchExhausted(PkitError):
    exit_code = 3


class ParseError(PkitError):
    def __init__(self, message, line=None, col=None, expected=None):
        self.line = line
        self.col = col
        self.expected = expected
        where = f"line {line}, col {col}: " if line is not None else ""
        super().__init__(where + message)

    def payload(self):
        d = super().payload()
        d.update(line=self.line, col=self.col, expected=self.expected)
        return d
