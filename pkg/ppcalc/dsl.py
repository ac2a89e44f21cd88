"""
Text syntax for pp formulas.

    formula := [ "E" ident+ "." ] conj
    conj    := item ( "&" item )*
    item    := lin "=" lin | int "|" ident
    lin     := [ "-" ] term ( ( "+" | "-" ) term )*
    term    := [ int "*" ] ident | int
    ident   := ( "x" | "y" ) digits

Free variables are ``x1 .. xn`` (``n`` is the largest index used), bound
variables ``y..`` must be declared after ``E`` and are numbered in declaration
order. ``r|xi`` introduces a fresh bound variable ``y`` with ``xi = r*y``.

Both directions go through the canonical matrix form: zero equations are
dropped and the first nonzero entry of each row of ``[a | b]`` is positive.
"""
import logging
import re
from typing import Iterator, NamedTuple, Optional

from ppcalc.errors import CoefficientError, FormulaSyntaxError, UnboundVariableError
from ppcalc.formulas import PpFormula

logger = logging.getLogger(__name__)

_TOKEN_REGEX = re.compile(
    r"(?P<fraction>\d+[./]\d+)"
    r"|(?P<number>\d+)"
    r"|(?P<ident>[xy]\d+)"
    r"|(?P<exists>E)"
    r"|(?P<dot>\.)"
    r"|(?P<op>[-+*=&|])"
    r"|(?P<space>\s+)"
    r"|(?P<mismatch>.)"
)


class Token(NamedTuple):
    kind: str
    value: str
    where: int


def tokenize(text: str) -> Iterator[Token]:
    for mo in _TOKEN_REGEX.finditer(text):
        kind = str(mo.lastgroup)
        value = mo.group()
        if kind == "space":
            continue
        if kind == "mismatch":
            raise FormulaSyntaxError(f"unexpected character {value!r}", mo.start(), text)
        if kind == "fraction":
            raise CoefficientError(f"non-integer coefficient {value}", mo.start(), text)
        yield Token(kind, value, mo.start())


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = list(tokenize(text))
        self.pos = 0
        self.bound: dict[str, int] = {}
        self.fresh = 0
        # each equation: (x coefficients by index, y coefficients by name)
        self.equations: list[tuple[dict[int, int], dict[str, int]]] = []

    # -- token helpers ------------------------------------------------------

    def peek(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def where(self) -> int:
        tok = self.peek()
        return tok.where if tok else len(self.text)

    def error(self, message: str) -> FormulaSyntaxError:
        return FormulaSyntaxError(message, self.where(), self.text)

    def take(self, kind: str, value: Optional[str] = None) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != kind or (value is not None and tok.value != value):
            expected = value or kind
            found = tok.value if tok else "end of input"
            raise self.error(f"expected {expected}, found {found!r}")
        self.pos += 1
        return tok

    def at(self, kind: str, value: Optional[str] = None) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == kind and (value is None or tok.value == value)

    # -- grammar ------------------------------------------------------------

    def parse(self) -> None:
        if self.at("exists"):
            self.take("exists")
            while self.at("ident"):
                tok = self.take("ident")
                if not tok.value.startswith("y"):
                    raise FormulaSyntaxError(
                        f"only y variables can be bound, got {tok.value}", tok.where, self.text
                    )
                if tok.value in self.bound:
                    raise FormulaSyntaxError(f"{tok.value} declared twice", tok.where, self.text)
                self.bound[tok.value] = len(self.bound)
            if not self.bound:
                raise self.error("expected at least one bound variable after E")
            self.take("dot")
        self.item()
        while self.at("op", "&"):
            self.take("op", "&")
            self.item()
        leftover = self.peek()
        if leftover is not None:
            raise self.error(f"unexpected {leftover.value!r}")

    def item(self) -> None:
        if self.at("number") and self.pos + 1 < len(self.tokens) and self.tokens[self.pos + 1].value == "|":
            r = int(self.take("number").value)
            self.take("op", "|")
            tok = self.take("ident")
            if not tok.value.startswith("x"):
                raise FormulaSyntaxError("divisibility applies to free variables", tok.where, self.text)
            fresh = f"_{self.fresh}"
            self.fresh += 1
            self.equations.append(({int(tok.value[1:]): 1}, {fresh: -r}))
            return
        start = self.where()
        left_x, left_y, left_c = self.lin()
        self.take("op", "=")
        right_x, right_y, right_c = self.lin()
        if left_c != right_c:
            raise CoefficientError("equation has a nonzero constant term", start, self.text)
        for key, value in right_x.items():
            left_x[key] = left_x.get(key, 0) - value
        for key, value in right_y.items():
            left_y[key] = left_y.get(key, 0) - value
        self.equations.append((left_x, left_y))

    def lin(self) -> tuple[dict[int, int], dict[str, int], int]:
        xs: dict[int, int] = {}
        ys: dict[str, int] = {}
        const = 0
        sign = 1
        if self.at("op", "-"):
            self.take("op", "-")
            sign = -1
        while True:
            term_start = self.where()
            coeff, name = self.term()
            coeff *= sign
            if name is None:
                const += coeff
            elif name.startswith("x"):
                index = int(name[1:])
                if index < 1:
                    raise FormulaSyntaxError("variables are numbered from 1", term_start, self.text)
                xs[index] = xs.get(index, 0) + coeff
            else:
                if name not in self.bound:
                    raise UnboundVariableError(f"unbound variable {name}", term_start, self.text)
                ys[name] = ys.get(name, 0) + coeff
            if self.at("op", "+"):
                self.take("op", "+")
                sign = 1
            elif self.at("op", "-"):
                self.take("op", "-")
                sign = -1
            else:
                return xs, ys, const

    def term(self) -> tuple[int, Optional[str]]:
        if self.at("number"):
            value = int(self.take("number").value)
            if self.at("op", "*"):
                self.take("op", "*")
                return value, self.take("ident").value
            return value, None
        if self.at("ident"):
            return 1, self.take("ident").value
        raise self.error("expected a term")

    # -- assembly -----------------------------------------------------------

    def formula(self) -> PpFormula:
        n = max((i for xs, _ in self.equations for i in xs), default=0)
        m = len(self.bound) + self.fresh
        a_rows, b_rows = [], []
        for xs, ys in self.equations:
            a_rows.append([xs.get(j + 1, 0) for j in range(n)])
            b = [0] * m
            for name, value in ys.items():
                column = self.bound[name] if name in self.bound else len(self.bound) + int(name[1:])
                # moving y to the right-hand side flips its sign
                b[column] = -value
            b_rows.append(b)
        return canonical(PpFormula.build(n, m, a_rows, b_rows))


def canonical(phi: PpFormula) -> PpFormula:
    """Drop zero equations and make each row's first nonzero entry positive."""
    a_rows, b_rows = [], []
    for ra, rb in zip(phi.a.entries, phi.b.entries):
        row = ra + rb
        lead = next((v for v in row if v), 0)
        if lead == 0:
            continue
        sign = 1 if lead > 0 else -1
        a_rows.append([sign * v for v in ra])
        b_rows.append([sign * v for v in rb])
    return PpFormula.build(phi.n, phi.m, a_rows, b_rows)


def parse_formula(text: str) -> PpFormula:
    """Parse the DSL into canonical matrix form.

    >>> parse_formula("2*x1 = 0").a.to_list()
    [[2]]
    >>> parse_formula("x1 = x1").equations
    0
    """
    parser = _Parser(text)
    parser.parse()
    phi = parser.formula()
    logger.debug(f"parsed {text!r} into n={phi.n} m={phi.m} e={phi.equations}")
    return phi


def _side(coeffs: tuple[int, ...], letter: str, marker: Optional[int] = None) -> str:
    parts: list[str] = []
    for i, c in enumerate(coeffs):
        if c == 0 and i != marker:
            continue
        name = f"{letter}{i + 1}"
        body = name if abs(c) == 1 else f"{abs(c)}*{name}"
        if not parts:
            parts.append(body if c >= 0 else f"-{body}")
        else:
            parts.append(f"{'-' if c < 0 else '+'} {body}")
    return " ".join(parts) if parts else "0"


def format_formula(phi: PpFormula) -> str:
    """Render in the DSL; ``parse_formula`` reads the result back to ``canonical(phi)``."""
    phi = canonical(phi)
    used = {j for r in phi.a.entries for j, v in enumerate(r) if v}
    marker = phi.n - 1 if phi.n and (phi.n - 1) not in used else None
    equations = []
    for i, (ra, rb) in enumerate(zip(phi.a.entries, phi.b.entries)):
        lhs = _side(ra, "x", marker if i == 0 else None)
        equations.append(f"{lhs} = {_side(rb, 'y')}")
    if not equations:
        equations.append(f"0*x{phi.n} = 0" if phi.n else "0 = 0")
    body = " & ".join(equations)
    if phi.m:
        names = " ".join(f"y{l + 1}" for l in range(phi.m))
        return f"E {names} . {body}"
    return body
