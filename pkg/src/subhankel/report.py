"""Outcome records returned by the verifiers."""
from dataclasses import dataclass, field
from fractions import Fraction

PASS = "pass"
PASS_UP_TO_SIGN = "pass-up-to-sign"
CONSTANT_RATIO = "constant-ratio"
FAIL = "fail"
UNSUPPORTED = "unsupported"


def to_json_value(value):
    """Make a report payload JSON-safe: rationals become ``"p/q"`` strings."""
    from .poly import Poly

    if isinstance(value, dict):
        return {str(k): to_json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_json_value(v) for v in value]
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Poly):
        return str(value)
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        f = Fraction(int(value.numerator), int(value.denominator))
        return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
    return str(value)


@dataclass
class IdentityReport:
    """Result of checking a family of exact identities.

    ``checked`` counts individual identities; ``failures`` holds a readable
    line for each one that did not hold.
    """

    name: str
    status: str = PASS
    checked: int = 0
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.status in (PASS, PASS_UP_TO_SIGN)

    def record(self, ok, message):
        self.checked += 1
        if not ok:
            self.failures.append(message)
            self.status = FAIL
        return ok

    def to_dict(self):
        return {
            "name": self.name,
            "status": self.status,
            "checked": self.checked,
            "failures": list(self.failures),
            "details": to_json_value(self.details),
        }
