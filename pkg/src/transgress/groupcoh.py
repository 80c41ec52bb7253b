"""Bar-complex cohomology of finite groups and extension classes."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Hashable, Sequence

from .exactcoeff import (
    IntMatrix,
    frac_mod1,
    snf,
    solve_integer,
    solve_mod1,
)


class NotACocycle(ValueError):
    pass


class SectionInvalid(ValueError):
    pass


class GroupTableError(ValueError):
    pass


# ---------------------------------------------------------------- groups


class FiniteGroup:
    """A finite group given by its multiplication table.

    ``table[g][h]`` is the index of ``g*h``.  Tables are validated on
    construction (closure, identity, inverses, associativity).
    """

    def __init__(self, table: Sequence[Sequence[int]], identity: int = 0, labels=None, check=True):
        self.table = [list(r) for r in table]
        self.order = len(self.table)
        self.identity = identity
        self.labels = list(labels) if labels is not None else [str(i) for i in range(self.order)]
        if check:
            self._validate()
        inv = [None] * self.order
        for g in range(self.order):
            for h in range(self.order):
                if self.table[g][h] == identity:
                    inv[g] = h
                    break
        self.inverse = inv

    def _validate(self):
        n = self.order
        t = self.table
        if any(len(r) != n for r in t) or any(not 0 <= x < n for r in t for x in r):
            raise GroupTableError("table is not closed")
        e = self.identity
        if any(t[e][g] != g or t[g][e] != g for g in range(n)):
            raise GroupTableError("identity is not two-sided")
        for g in range(n):
            if e not in t[g]:
                raise GroupTableError(f"element {g} has no inverse")
        for a in range(n):
            ta = t[a]
            for b in range(n):
                ab = ta[b]
                tb = t[b]
                tab = t[ab]
                for c in range(n):
                    if tab[c] != ta[tb[c]]:
                        raise GroupTableError(f"not associative at {(a, b, c)}")

    @classmethod
    def from_elements(cls, elements: Sequence[Hashable], mul: Callable, labels=None) -> "FiniteGroup":
        index = {x: i for i, x in enumerate(elements)}
        table = [[index[mul(a, b)] for b in elements] for a in elements]
        ident = None
        for i, a in enumerate(elements):
            if all(mul(a, b) == b for b in elements):
                ident = i
                break
        if ident is None:
            raise GroupTableError("no identity")
        return cls(table, ident, labels=labels or [str(x) for x in elements])

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        return cls([[(a + b) % n for b in range(n)] for a in range(n)], 0)

    @classmethod
    def product(cls, *factors: "FiniteGroup") -> "FiniteGroup":
        elems = list(itertools.product(*[range(f.order) for f in factors]))

        def mul(a, b):
            return tuple(f.table[x][y] for f, x, y in zip(factors, a, b))

        labels = ["(" + ",".join(f.labels[x] for f, x in zip(factors, e)) + ")" for e in elems]
        return cls.from_elements(elems, mul, labels=labels)

    def mul(self, g: int, h: int) -> int:
        return self.table[g][h]

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != self.identity:
            x = self.table[x][g]
            k += 1
        return k

    def is_abelian(self) -> bool:
        t = self.table
        return all(t[a][b] == t[b][a] for a in range(self.order) for b in range(a))

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"

    def tuples(self, p: int):
        return itertools.product(range(self.order), repeat=p)

    def tuple_index(self, t: Sequence[int]) -> int:
        i = 0
        for g in t:
            i = i * self.order + g
        return i

    @cached_property
    def _matrix_cache(self) -> dict:
        return {}


# ---------------------------------------------------------------- modules


class CoefficientModule:
    """Right Γ-module of coefficients.  Subclasses fix the value type."""

    name = "?"
    trivial_action = True

    def zero(self):
        raise NotImplementedError

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def act(self, a, g: int):
        return a

    def normalize(self, a):
        return a

    def scale(self, a, n: int):
        return n * a

    def encode(self, a):
        return a

    def decode(self, x):
        return x

    def __eq__(self, other):
        return type(self) is type(other) and self.__dict__ == other.__dict__

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return self.name


class IntegerModule(CoefficientModule):
    name = "Z"

    def zero(self):
        return 0

    def normalize(self, a):
        if isinstance(a, Fraction):
            if a.denominator != 1:
                raise ValueError(f"{a} is not an integer")
            return a.numerator
        return int(a)


class RationalModule(CoefficientModule):
    name = "Q"

    def zero(self):
        return Fraction(0)

    def normalize(self, a):
        return Fraction(a)

    def encode(self, a):
        return str(a)

    def decode(self, x):
        return Fraction(x)


class CircleModule(CoefficientModule):
    """Q/Z with trivial action; values are Fractions in ``[0, 1)``."""

    name = "Q/Z"

    def zero(self):
        return Fraction(0)

    def add(self, a, b):
        return frac_mod1(a + b)

    def neg(self, a):
        return frac_mod1(-a)

    def normalize(self, a):
        return frac_mod1(getattr(a, "value", a))

    def scale(self, a, n):
        return frac_mod1(n * a)

    def encode(self, a):
        return str(a)

    def decode(self, x):
        return frac_mod1(Fraction(x))


class CyclicModule(CoefficientModule):
    """Z/n with ``a.g = units[g] * a``; trivial when ``units`` is None."""

    def __init__(self, n: int, units: Sequence[int] | None = None):
        self.n = n
        self.units = list(units) if units is not None and any(u % n != 1 % n for u in units) else None
        self.trivial_action = self.units is None
        self.name = f"Z/{n}"

    def zero(self):
        return 0

    def add(self, a, b):
        return (a + b) % self.n

    def neg(self, a):
        return (-a) % self.n

    def act(self, a, g):
        if self.units is None:
            return a
        return (self.units[g] * a) % self.n

    def normalize(self, a):
        return int(a) % self.n

    def scale(self, a, k):
        return (k * a) % self.n

    def unit(self, g: int) -> int:
        return 1 if self.units is None else self.units[g]

    def to_circle(self, a) -> Fraction:
        return Fraction(a % self.n, self.n)


ZZ = IntegerModule()
QQ = RationalModule()
QZ = CircleModule()


# ---------------------------------------------------------------- cochains


@dataclass(frozen=True)
class BarCochain:
    """A function ``Γ^p -> M``, stored in lexicographic tuple order."""

    group: FiniteGroup
    degree: int
    module: CoefficientModule
    values: tuple

    def __post_init__(self):
        expected = self.group.order ** self.degree
        if len(self.values) != expected:
            raise ValueError(f"degree-{self.degree} cochain needs {expected} values")
        object.__setattr__(self, "values", tuple(self.module.normalize(v) for v in self.values))

    @classmethod
    def from_function(cls, group, degree, module, fn) -> "BarCochain":
        return cls(group, degree, module, tuple(fn(*t) for t in group.tuples(degree)))

    @classmethod
    def zero(cls, group, degree, module) -> "BarCochain":
        return cls(group, degree, module, (module.zero(),) * group.order ** degree)

    def __call__(self, *gs: int):
        return self.values[self.group.tuple_index(gs)]

    def _check(self, other):
        if self.group is not other.group or self.degree != other.degree or self.module != other.module:
            raise ValueError("incompatible bar cochains")

    def __add__(self, other):
        self._check(other)
        m = self.module
        return BarCochain(self.group, self.degree, m, tuple(m.add(a, b) for a, b in zip(self.values, other.values)))

    def __neg__(self):
        m = self.module
        return BarCochain(self.group, self.degree, m, tuple(m.neg(a) for a in self.values))

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self) -> bool:
        z = self.module.zero()
        return all(v == z for v in self.values)

    def map_values(self, module, fn) -> "BarCochain":
        return BarCochain(self.group, self.degree, module, tuple(fn(v) for v in self.values))

    def to_json(self):
        return [self.module.encode(v) for v in self.values]


def bar_coboundary(c: BarCochain) -> BarCochain:
    """The alternating bar coboundary with a right action in the last slot.

    ``dc(g1..gp+1) = c(g2..) + sum_i (-1)^i c(.., gi*gi+1, ..)
    + (-1)^(p+1) c(g1..gp).g_{p+1}``
    """
    G, p, m = c.group, c.degree, c.module
    t = G.table
    vals = c.values
    out = []
    for tup in G.tuples(p + 1):
        acc = vals[G.tuple_index(tup[1:])]
        for i in range(p):
            merged = tup[:i] + (t[tup[i]][tup[i + 1]],) + tup[i + 2:]
            v = vals[G.tuple_index(merged)]
            acc = m.add(acc, v if i % 2 else m.neg(v))
        last = m.act(vals[G.tuple_index(tup[:p])], tup[p])
        acc = m.add(acc, m.neg(last) if p % 2 == 0 else last)
        out.append(acc)
    return BarCochain(G, p + 1, m, tuple(out))


def coboundary_matrix(G: FiniteGroup, p: int, units: Sequence[int] | None = None) -> IntMatrix:
    """Matrix of ``C^p -> C^{p+1}`` for a module whose action is ``a -> units[g]*a``."""
    key = (p, tuple(units) if units is not None else None)
    cache = G._matrix_cache
    if key in cache:
        return cache[key]
    t = G.table
    n = G.order
    rows = []
    for tup in G.tuples(p + 1):
        row: dict = {}

        def bump(col, v):
            row[col] = row.get(col, 0) + v

        bump(G.tuple_index(tup[1:]), 1)
        for i in range(p):
            merged = tup[:i] + (t[tup[i]][tup[i + 1]],) + tup[i + 2:]
            bump(G.tuple_index(merged), -1 if i % 2 == 0 else 1)
        u = 1 if units is None else units[tup[p]]
        bump(G.tuple_index(tup[:p]), (-1 if p % 2 == 0 else 1) * u)
        rows.append({c: v for c, v in row.items() if v})
    mat = IntMatrix(n ** (p + 1), n ** p, rows)
    cache[key] = mat
    return mat


def _decomp(G: FiniteGroup, p: int, units=None, modulus: int | None = None):
    key = ("snf", p, tuple(units) if units is not None else None, modulus)
    cache = G._matrix_cache
    if key not in cache:
        mat = coboundary_matrix(G, p, units)
        if modulus:
            rows = [dict(r) for r in mat.rows()]
            base = mat.ncols
            for i, r in enumerate(rows):
                r[base + i] = modulus
            mat = IntMatrix(mat.nrows, mat.ncols + mat.nrows, rows)
        cache[key] = snf(mat)
    return cache[key]


def is_group_cocycle(c: BarCochain) -> bool:
    return bar_coboundary(c).is_zero()


def is_group_coboundary(z: BarCochain) -> BarCochain | None:
    """A primitive ``b`` with ``bar_coboundary(b) == z``, or None."""
    if not is_group_cocycle(z):
        raise NotACocycle(f"degree-{z.degree} cochain is not closed")
    G, p, m = z.group, z.degree, z.module
    if p == 0:
        return None if not z.is_zero() else BarCochain(G, 0, m, ())  # pragma: no cover
    if isinstance(m, IntegerModule):
        x = solve_integer(_decomp(G, p - 1), list(z.values))
    elif isinstance(m, CircleModule):
        x = solve_mod1(_decomp(G, p - 1), list(z.values))
    elif isinstance(m, RationalModule):
        x = _solve_rational(_decomp(G, p - 1), list(z.values))
    elif isinstance(m, CyclicModule):
        units = None if m.units is None else [u % m.n for u in m.units]
        x = solve_integer(_decomp(G, p - 1, units, m.n), list(z.values))
        if x is not None:
            x = x[: G.order ** (p - 1)]
    else:
        raise TypeError(f"no solver for module {m!r}")
    if x is None:
        return None
    b = BarCochain(G, p - 1, m, tuple(x))
    assert bar_coboundary(b) == z
    return b


def _solve_rational(dec, b):
    ub = dec.apply_left([Fraction(v) for v in b])
    y = [Fraction(0)] * dec.matrix.ncols
    prow = set()
    for i, j, d in dec.pivots:
        prow.add(i)
        y[j] = ub[i] / d
    if any(ub[i] for i in range(len(ub)) if i not in prow):
        return None
    return dec.apply_right(y)


@dataclass(frozen=True)
class CohomologyGroup:
    """``rank`` free summands (Z, or Q/Z for divisible coefficients) plus torsion."""

    rank: int
    torsion: tuple = ()
    free_symbol: str = "ℤ"

    def __str__(self):
        parts = []
        if self.rank == 1:
            parts.append(self.free_symbol)
        elif self.rank > 1:
            parts.append(f"{self.free_symbol}^{self.rank}")
        parts += [f"ℤ/{d}" for d in self.torsion]
        if not parts:
            return "0"
        if self.rank == 0:
            parts.insert(0, "0")
        return " + ".join(parts)

    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion


def group_cohomology(G: FiniteGroup, p: int, module: CoefficientModule = ZZ) -> CohomologyGroup:
    """H^p(G; M) for M = Z or Q/Z with trivial action, via SNF."""
    if p > 4:
        raise ValueError("degree bound is 4")
    n_p = G.order ** p
    rank_p = _decomp(G, p).rank
    prev = _decomp(G, p - 1) if p > 0 else None
    rank_prev = prev.rank if prev else 0
    betti = n_p - rank_p - rank_prev
    if isinstance(module, IntegerModule):
        tors = tuple(d for d in (prev.diagonal if prev else []) if d > 1)
        return CohomologyGroup(betti, tors)
    if isinstance(module, CircleModule):
        tors = tuple(d for d in _decomp(G, p).diagonal if d > 1)
        return CohomologyGroup(betti, tors, "ℚ/ℤ")
    raise TypeError("group_cohomology supports Z and Q/Z coefficients")


def connecting_delta(c: BarCochain) -> BarCochain:
    """Bockstein ``H^p(G;Q/Z) -> H^{p+1}(G;Z)``: coboundary of the [0,1) lift."""
    if isinstance(c.module, CyclicModule) and c.module.trivial_action:
        c = c.map_values(QZ, c.module.to_circle)
    if not isinstance(c.module, CircleModule):
        raise TypeError("connecting_delta needs Q/Z coefficients with trivial action")
    if not is_group_cocycle(c):
        raise NotACocycle("connecting_delta of a non-cocycle")
    lift = c.map_values(QQ, lambda v: v)
    d = bar_coboundary(lift)
    return d.map_values(ZZ, lambda v: v)


# ---------------------------------------------------------------- extensions


@dataclass
class ExtensionTable:
    """``1 -> A -> E -> Γ -> 1`` with E given concretely.

    ``kernel_values`` maps each kernel element of E to its value in
    ``kernel_module``; ``section[g]`` is an element of E over ``g``.
    """

    total: FiniteGroup
    kernel: list
    quotient: FiniteGroup
    projection: list
    kernel_module: CoefficientModule
    kernel_values: dict
    section: list | None = None
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        E = self.total
        ker = set(self.kernel)
        if ker != {x for x in range(E.order) if self.projection[x] == self.quotient.identity}:
            raise GroupTableError("kernel is not the preimage of the identity")
        for a in range(E.order):
            for b in range(E.order):
                if self.projection[E.table[a][b]] != self.quotient.table[self.projection[a]][self.projection[b]]:
                    raise GroupTableError("projection is not a homomorphism")
        if self.section is not None:
            self.check_section(self.section)

    def check_section(self, s):
        if len(s) != self.quotient.order or any(self.projection[s[g]] != g for g in range(self.quotient.order)):
            raise SectionInvalid("p o s != id")

    @property
    def is_central(self) -> bool:
        t = self.total.table
        return all(t[a][x] == t[x][a] for a in self.kernel for x in range(self.total.order))

    def canonical_section(self) -> list:
        s = [None] * self.quotient.order
        for x in range(self.total.order):
            g = self.projection[x]
            if s[g] is None:
                s[g] = x
        s[self.quotient.identity] = self.total.identity
        return s

    def kernel_value(self, x: int):
        return self.kernel_values[x]

    def value_to_kernel(self) -> dict:
        return {v: x for x, v in self.kernel_values.items()}

    def circle_values(self) -> dict | None:
        m = self.kernel_module
        if isinstance(m, CircleModule):
            return dict(self.kernel_values)
        if isinstance(m, CyclicModule):
            return {x: m.to_circle(v) for x, v in self.kernel_values.items()}
        return None

    @classmethod
    def from_table(cls, total: FiniteGroup, kernel: Sequence[int], name: str = "", meta=None) -> "ExtensionTable":
        """Quotient by a normal abelian subgroup; cyclic kernels only for coefficients."""
        E = total
        kernel = sorted(set(kernel))
        kset = set(kernel)
        for a in kernel:
            for b in kernel:
                if E.table[a][b] not in kset or E.table[a][b] != E.table[b][a]:
                    raise GroupTableError("kernel is not an abelian subgroup")
        for x in range(E.order):
            for a in kernel:
                if E.table[E.table[E.inverse[x]][a]][x] not in kset:
                    raise GroupTableError("kernel is not normal")
        coset_of = {}
        cosets = []
        order = [E.identity] + [x for x in range(E.order) if x != E.identity]
        for x in order:
            if x in coset_of:
                continue
            cos = sorted(E.table[x][a] for a in kernel)
            for y in cos:
                coset_of[y] = len(cosets)
            cosets.append(cos)
        q = len(cosets)
        qt = [[coset_of[E.table[cosets[i][0]][cosets[j][0]]] for j in range(q)] for i in range(q)]
        quotient = FiniteGroup(qt, 0, labels=["{" + ",".join(E.labels[y] for y in c) + "}" for c in cosets])
        projection = [coset_of[x] for x in range(E.order)]
        n = len(kernel)
        gen = next((a for a in kernel if E.element_order(a) == n), None)
        if gen is None:
            raise NotImplementedError("only cyclic kernels are supported as coefficient modules")
        exps = {}
        x = E.identity
        for k in range(n):
            exps[x] = k
            x = E.table[x][gen]
        ext = cls(E, kernel, quotient, projection, CyclicModule(n), exps, name=name, meta=dict(meta or {}))
        s = ext.canonical_section()
        units = []
        for g in range(q):
            sg = s[g]
            conj = E.table[E.table[E.inverse[sg]][gen]][sg]
            units.append(exps[conj])
        ext.kernel_module = CyclicModule(n, units)
        ext.section = s
        return ext

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "labels": self.total.labels,
            "table": self.total.table,
            "identity": self.total.identity,
            "kernel": list(self.kernel),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ExtensionTable":
        total = FiniteGroup(data["table"], data.get("identity", 0), labels=data.get("labels"))
        return cls.from_table(total, data["kernel"], name=data.get("name", ""))


def extension_class(E: ExtensionTable, section: Sequence[int] | None = None) -> BarCochain:
    """The 2-cocycle ``c(g,h) = s(g)s(h)s(gh)^{-1}`` read in the kernel."""
    s = list(section) if section is not None else (E.section or E.canonical_section())
    E.check_section(s)
    T = E.total.table
    inv = E.total.inverse
    Q = E.quotient

    def c(g, h):
        x = T[T[s[g]][s[h]]][inv[s[Q.table[g][h]]]]
        return E.kernel_value(x)

    cocycle = BarCochain.from_function(Q, 2, E.kernel_module, c)
    if not is_group_cocycle(cocycle):
        raise NotACocycle("extension cocycle failed the cocycle identity")
    return cocycle


# ---------------------------------------------------------------- corpus


def _quaternion_group() -> FiniteGroup:
    # elements (sign, unit) with unit in 1,i,j,k
    units = {("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
             ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
             ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
             ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1")}
    elems = [(s, u) for u in "1ijk" for s in (1, -1)]

    def mul(a, b):
        sg, u = units[(a[1], b[1])]
        return (a[0] * b[0] * sg, u)

    labels = [("" if s > 0 else "-") + u for s, u in elems]
    return FiniteGroup.from_elements(elems, mul, labels=labels)


def _dihedral(n: int) -> FiniteGroup:
    elems = [(r, f) for f in (0, 1) for r in range(n)]

    def mul(a, b):
        r1, f1 = a
        r2, f2 = b
        return ((r1 + (-r2 if f1 else r2)) % n, f1 ^ f2)

    return FiniteGroup.from_elements(elems, mul, labels=[f"r{r}" + ("s" if f else "") for r, f in elems])


def _heisenberg(p: int) -> FiniteGroup:
    """Upper unitriangular 3x3 matrices over Z/p, as triples ``(z, x, y)``."""
    elems = [(z, x, y) for z in range(p) for x in range(p) for y in range(p)]

    def mul(a, b):
        return ((a[0] + b[0] + a[1] * b[2]) % p, (a[1] + b[1]) % p, (a[2] + b[2]) % p)

    return FiniteGroup.from_elements(elems, mul)


def standard_corpus() -> list[ExtensionTable]:
    """Finite extensions used by the regression suite."""
    z2 = FiniteGroup.cyclic(2)
    out = []
    out.append(ExtensionTable.from_table(FiniteGroup.product(z2, z2), [0, 2], "Z2xZ2_split"))
    z6 = FiniteGroup.cyclic(6)
    out.append(ExtensionTable.from_table(z6, [0, 2, 4], "Z6_over_Z2_split"))
    s3 = _dihedral(3)
    out.append(ExtensionTable.from_table(s3, [0, 1, 2], "S3_split"))
    out.append(ExtensionTable.from_table(FiniteGroup.cyclic(4), [0, 2], "Z4_over_Z2"))
    out.append(ExtensionTable.from_table(FiniteGroup.cyclic(9), [0, 3, 6], "Z9_over_Z3"))
    q8 = _quaternion_group()
    out.append(ExtensionTable.from_table(q8, [0, 1], "Q8_over_V4"))
    d4 = _dihedral(4)
    out.append(ExtensionTable.from_table(d4, [0, 2], "D4_over_V4"))
    # H^3 of the quotient has odd order here, so signs are visible
    out.append(ExtensionTable.from_table(_heisenberg(3), [0, 9, 18], "Heis3_over_Z3xZ3"))
    return out


def corpus_to_json(exts: Sequence[ExtensionTable]) -> dict:
    return {"schema": "transgress.extensions/1", "extensions": [e.to_json() for e in exts]}


def corpus_from_json(data: dict) -> list[ExtensionTable]:
    if data.get("schema") != "transgress.extensions/1":
        raise ValueError("not an extension corpus file")
    return [ExtensionTable.from_json(e) for e in data["extensions"]]
