"""Division-free straight-line programs.

A program is a list of instructions, each one of::

    ("zero",)  ("one",)  ("in", j)  ("add", a, b)  ("sub", a, b)  ("mul", a, b)

where ``a`` and ``b`` refer to earlier instructions. Its length counts only the
arithmetic instructions, which is the cost unit used throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ParseError
from .numeric import RatInterval, to_rational
from .poly import MultiPoly

ARITH = ("add", "sub", "mul")
_ARITY = {"zero": 0, "one": 0, "in": 1, "add": 2, "sub": 2, "mul": 2}


@dataclass(frozen=True)
class Slp:
    num_inputs: int
    code: tuple
    outputs: tuple

    def __post_init__(self):
        code = tuple(tuple(ins) for ins in self.code)
        object.__setattr__(self, "code", code)
        object.__setattr__(self, "outputs", tuple(self.outputs))
        for pos, ins in enumerate(code):
            if not ins or ins[0] not in _ARITY or len(ins) != 1 + _ARITY[ins[0]]:
                raise ValueError(f"malformed instruction {ins!r} at {pos}")
            if ins[0] == "in":
                if not 0 <= ins[1] < self.num_inputs:
                    raise ValueError(f"input index {ins[1]} out of range at {pos}")
            elif ins[0] in ARITH:
                if not (0 <= ins[1] < pos and 0 <= ins[2] < pos):
                    raise ValueError(f"dangling operand in {ins!r} at {pos}")
        for o in self.outputs:
            if not 0 <= o < len(code):
                raise ValueError(f"output index {o} out of range")

    @property
    def length(self) -> int:
        return sum(1 for ins in self.code if ins[0] in ARITH)

    def to_json(self) -> dict:
        return {"inputs": self.num_inputs, "code": [list(i) for i in self.code], "out": list(self.outputs)}

    @classmethod
    def from_json(cls, obj) -> "Slp":
        try:
            return cls(int(obj["inputs"]), tuple(tuple(i) for i in obj["code"]), tuple(obj["out"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed SLP JSON: {exc}") from exc


class SlpBuilder:
    """Append-only instruction buffer used to assemble programs."""

    def __init__(self, num_inputs: int):
        self.num_inputs = num_inputs
        self.code: list[tuple] = []
        self._consts: dict[str, int] = {}

    def emit(self, *ins) -> int:
        self.code.append(tuple(ins))
        return len(self.code) - 1

    def zero(self) -> int:
        if "zero" not in self._consts:
            self._consts["zero"] = self.emit("zero")
        return self._consts["zero"]

    def one(self) -> int:
        if "one" not in self._consts:
            self._consts["one"] = self.emit("one")
        return self._consts["one"]

    def inp(self, j: int) -> int:
        return self.emit("in", j)

    def add(self, a, b):
        return self.emit("add", a, b)

    def sub(self, a, b):
        return self.emit("sub", a, b)

    def mul(self, a, b):
        return self.emit("mul", a, b)

    def const(self, c: int) -> int:
        """Emit ``c`` by binary double-and-add from the constants 0 and 1."""
        if c == 0:
            return self.zero()
        if c < 0:
            return self.sub(self.zero(), self.const(-c))
        one = self.one()
        acc = one
        for bit in bin(c)[3:]:
            acc = self.add(acc, acc)
            if bit == "1":
                acc = self.add(acc, one)
        return acc

    def build(self, outputs) -> Slp:
        return Slp(self.num_inputs, tuple(self.code), tuple(outputs))


def _constants_for(inputs):
    if inputs and isinstance(inputs[0], RatInterval):
        return RatInterval.point(0), RatInterval.point(1)
    if inputs and isinstance(inputs[0], MultiPoly):
        n = inputs[0].num_vars
        return MultiPoly.constant(0, n), MultiPoly.constant(1, n)
    return Fraction(0), Fraction(1)


def slp_eval(prog: Slp, inputs: Sequence, zero=None, one=None):
    """Run ``prog`` on ``inputs``; returns ``(output values, op_count)``.

    Values may be any type with ``+``, ``-``, ``*``. Plain numbers are coerced to
    Fractions. ``zero``/``one`` override the embedded constants.
    """
    if len(inputs) != prog.num_inputs:
        raise ValueError(f"program expects {prog.num_inputs} inputs, got {len(inputs)}")
    inputs = list(inputs)
    if inputs and not isinstance(inputs[0], (RatInterval, MultiPoly)) and zero is None:
        inputs = [to_rational(v) for v in inputs]
    z, o = _constants_for(inputs)
    if zero is not None:
        z = zero
    if one is not None:
        o = one
    vals = []
    ops = 0
    for ins in prog.code:
        op = ins[0]
        if op == "mul":
            vals.append(vals[ins[1]] * vals[ins[2]])
            ops += 1
        elif op == "add":
            vals.append(vals[ins[1]] + vals[ins[2]])
            ops += 1
        elif op == "sub":
            vals.append(vals[ins[1]] - vals[ins[2]])
            ops += 1
        elif op == "in":
            vals.append(inputs[ins[1]])
        elif op == "one":
            vals.append(o)
        else:
            vals.append(z)
    return [vals[i] for i in prog.outputs], ops


def slp_to_poly(prog: Slp) -> list[MultiPoly]:
    """Expand every output of ``prog`` into a :class:`MultiPoly`."""
    n = prog.num_inputs
    xs = [MultiPoly.variable(j, n) for j in range(n)]
    vals, _ = slp_eval(prog, xs, MultiPoly.constant(0, n), MultiPoly.constant(1, n))
    return vals


def synth_const(c: int) -> Slp:
    b = SlpBuilder(0)
    return b.build([b.const(int(c))])


def slp_from_poly(P: MultiPoly) -> Slp:
    """Straight-line program evaluating ``P`` term by term."""
    b = SlpBuilder(P.num_vars)
    if P.is_zero():
        return b.build([b.zero()])
    inputs: dict[int, int] = {}

    def var(j):
        if j not in inputs:
            inputs[j] = b.inp(j)
        return inputs[j]

    acc = None
    for exp, c in sorted(P.items(), key=lambda t: (-sum(t[0]), t[0])):
        mono = None
        for j, e in enumerate(exp):
            for _ in range(e):
                mono = var(j) if mono is None else b.mul(mono, var(j))
        mag = abs(c)
        if mono is None:
            term = b.const(mag)
        elif mag == 1:
            term = mono
        else:
            term = b.mul(b.const(mag), mono)
        if acc is None:
            acc = term if c > 0 else b.sub(b.zero(), term)
        else:
            acc = b.add(acc, term) if c > 0 else b.sub(acc, term)
    return b.build([acc])


def slp_specialize(prog: Slp, xi: Sequence[int]) -> Slp:
    """Replace the last ``len(xi)`` inputs of ``prog`` by the integer constants ``xi``."""
    n = len(xi)
    m = prog.num_inputs - n
    if m < 0:
        raise ValueError(f"program has {prog.num_inputs} inputs, cannot fix {n} of them")
    b = SlpBuilder(m)
    fixed: dict[int, int] = {}
    remap: list[int] = []
    for ins in prog.code:
        op = ins[0]
        if op == "in":
            j = ins[1]
            if j < m:
                remap.append(b.inp(j))
            else:
                if j not in fixed:
                    fixed[j] = b.const(int(xi[j - m]))
                remap.append(fixed[j])
        elif op == "zero":
            remap.append(b.zero())
        elif op == "one":
            remap.append(b.one())
        else:
            remap.append(b.emit(op, remap[ins[1]], remap[ins[2]]))
    return b.build([remap[o] for o in prog.outputs])


def build_powersum_slp(m: int, n: int) -> Slp:
    """Program for ``H(U, X) = sum_k prod_l (1 + (U_k**(2**(l-1)) - 1) * X_l)``.

    Inputs are ``U_1..U_m`` followed by ``X_1..X_n``. At a bit vector ``X = [j]``
    (least significant bit in ``X_1``) the value is ``sum_k U_k**j``.
    """
    if m < 1 or n < 1:
        raise ValueError("build_powersum_slp needs m >= 1 and n >= 1")
    b = SlpBuilder(m + n)
    one = b.one()
    xs = [b.inp(m + l) for l in range(n)]
    total = None
    for k in range(m):
        power = b.inp(k)
        prod = None
        for l in range(n):
            if l:
                power = b.mul(power, power)
            factor = b.add(one, b.mul(b.sub(power, one), xs[l]))
            prod = factor if prod is None else b.mul(prod, factor)
        total = prod if total is None else b.add(total, prod)
    return b.build([total])


def bits_of(j: int, n: int) -> tuple[int, ...]:
    """``[j]``: the ``n``-bit representation of ``j``, least significant bit first."""
    return tuple((j >> l) & 1 for l in range(n))
