"""Loss functions applied to the absolute prediction error."""
from dataclasses import dataclass
from fractions import Fraction

from . import errors as E
from .rational import as_rat, fmt_rat


@dataclass(frozen=True)
class LossFunction:
    """``kind`` is ``"id"``, ``"trunc"`` (max(x - eps, 0)) or ``"thresh"`` (1 if x >= eps)."""

    kind: str = "id"
    eps: Fraction = Fraction(0)

    def __call__(self, x):
        if self.kind == "id":
            return x
        if self.kind == "trunc":
            return x - self.eps if x > self.eps else Fraction(0)
        return Fraction(1) if x >= self.eps else Fraction(0)

    @property
    def name(self):
        if self.kind == "id":
            return "id"
        return ("l:" if self.kind == "trunc" else "L:") + fmt_rat(self.eps)


IDENTITY = LossFunction()


def truncated_linear(eps):
    eps = as_rat(eps)
    if eps <= 0:
        raise E.BadRange("epsilon must be positive")
    return LossFunction("trunc", eps)


def threshold_loss(eps):
    eps = as_rat(eps)
    if eps <= 0:
        raise E.BadRange("epsilon must be positive")
    return LossFunction("thresh", eps)


def parse_loss(text):
    """``id``, ``l:1/4`` (truncated linear) or ``L:1/4`` (threshold)."""
    if isinstance(text, LossFunction):
        return text
    if text in ("id", "identity"):
        return IDENTITY
    if text.startswith("l:"):
        return truncated_linear(text[2:])
    if text.startswith("L:"):
        return threshold_loss(text[2:])
    raise E.ParseError(f"unknown loss {text!r}; use id, l:<eps> or L:<eps>")
