# cython: language_level=3
"""Compiled ROBDD kernel.

Same interface and semantics as :mod:`cosma._bddpure`; the apply/quantify
recursions carry typed locals, which is what makes the unique-table inner
loop worth compiling.  :mod:`cosma.robdd` picks this module when it is
importable and the pure twin otherwise.
"""

TERMINAL_LEVEL = 1 << 30

cdef int _TERMINAL = 1 << 30
cdef int _ITE = 0
cdef int _EXISTS = 1
cdef int _RENAME = 2


cdef class BddKernel:
    cdef public int nvars
    cdef list _nodes
    cdef dict _unique
    cdef dict _cache

    def __cinit__(self):
        self.nvars = 0
        # node id -> (level, low, high); slots 0 and 1 are the terminals
        self._nodes = [(_TERMINAL, 0, 0), (_TERMINAL, 1, 1)]
        self._unique = {}
        self._cache = {}

    def __len__(self):
        return len(self._nodes)

    cpdef int add_var(self):
        cdef int level = self.nvars
        self.nvars += 1
        return level

    cpdef int var(self, int level) except -1:
        if level < 0 or level >= self.nvars:
            raise ValueError(f"undeclared variable level {level}")
        return self._make(level, 0, 1)

    def node(self, int ref):
        """The (level, low, high) triple behind ``ref``."""
        return self._nodes[ref]

    cdef int _make(self, int level, int low, int high) except -1:
        if low == high:
            return low
        cdef tuple key = (level, low, high)
        found = self._unique.get(key)
        if found is not None:
            return <int> found
        cdef int ref = len(self._nodes)
        self._nodes.append(key)
        self._unique[key] = ref
        return ref

    cpdef int ite(self, int f, int g, int h) except -1:
        if f == 1:
            return g
        if f == 0:
            return h
        if g == h:
            return g
        if g == 1 and h == 0:
            return f
        if f == g:
            g = 1
        if f == h:
            h = 0
        cdef tuple key = (_ITE, f, g, h)
        cached = self._cache.get(key)
        if cached is not None:
            return <int> cached
        cdef list nodes = self._nodes
        cdef tuple nf = nodes[f]
        cdef tuple ng = nodes[g]
        cdef tuple nh = nodes[h]
        cdef int top = <int> nf[0]
        cdef int t = <int> ng[0]
        if t < top:
            top = t
        t = <int> nh[0]
        if t < top:
            top = t
        cdef int f0, f1, g0, g1, h0, h1
        if <int> nf[0] == top:
            f0 = <int> nf[1]
            f1 = <int> nf[2]
        else:
            f0 = f
            f1 = f
        if <int> ng[0] == top:
            g0 = <int> ng[1]
            g1 = <int> ng[2]
        else:
            g0 = g
            g1 = g
        if <int> nh[0] == top:
            h0 = <int> nh[1]
            h1 = <int> nh[2]
        else:
            h0 = h
            h1 = h
        cdef int low = self.ite(f0, g0, h0)
        cdef int high = self.ite(f1, g1, h1)
        cdef int result = self._make(top, low, high)
        self._cache[key] = result
        return result

    cpdef int not_(self, int f) except -1:
        return self.ite(f, 0, 1)

    cpdef int and_(self, int f, int g) except -1:
        if f > g:
            f, g = g, f
        return self.ite(f, g, 0)

    cpdef int or_(self, int f, int g) except -1:
        if f > g:
            f, g = g, f
        return self.ite(f, 1, g)

    cpdef int xor_(self, int f, int g) except -1:
        if f > g:
            f, g = g, f
        return self.ite(f, self.not_(g), g)

    cpdef int exists(self, int f, tuple levels) except -1:
        """Existential quantification over ``levels`` (sorted tuple)."""
        if f <= 1 or len(levels) == 0:
            return f
        cdef tuple key = (_EXISTS, f, levels)
        cached = self._cache.get(key)
        if cached is not None:
            return <int> cached
        cdef tuple nf = self._nodes[f]
        cdef int lv = <int> nf[0]
        cdef int low = <int> nf[1]
        cdef int high = <int> nf[2]
        cdef Py_ssize_t i = 0
        cdef Py_ssize_t n = len(levels)
        while i < n and <int> levels[i] < lv:
            i += 1  # quantified variable above the root: not in the support
        cdef tuple rest = levels[i:]
        cdef int result
        if len(rest) == 0:
            result = f
        elif <int> rest[0] == lv:
            result = self.or_(self.exists(low, rest[1:]), self.exists(high, rest[1:]))
        else:
            result = self._make(lv, self.exists(low, rest), self.exists(high, rest))
        self._cache[key] = result
        return result

    def rename(self, int f, tuple mapping):
        """Relabel variables; the mapping must be monotone and cover the support."""
        cdef Py_ssize_t i
        for i in range(len(mapping) - 1):
            if mapping[i][0] >= mapping[i + 1][0] or mapping[i][1] >= mapping[i + 1][1]:
                raise ValueError("rename mapping must be strictly monotone")
        return self._rename(f, dict(mapping), mapping)

    cdef int _rename(self, int f, dict table, tuple key_part) except -1:
        if f <= 1:
            return f
        cdef tuple key = (_RENAME, f, key_part)
        cached = self._cache.get(key)
        if cached is not None:
            return <int> cached
        cdef tuple nf = self._nodes[f]
        cdef int lv = <int> nf[0]
        target = table.get(lv)
        if target is None:
            raise ValueError(f"rename mapping misses support level {lv}")
        cdef int result = self._make(
            <int> target,
            self._rename(<int> nf[1], table, key_part),
            self._rename(<int> nf[2], table, key_part),
        )
        self._cache[key] = result
        return result

    def sat_count(self, int f, int nvars):
        """Number of satisfying assignments over the first ``nvars`` levels."""
        if nvars < 0 or nvars > self.nvars:
            raise ValueError(f"nvars {nvars} out of range")
        nodes = self._nodes
        memo = {}

        def level_of(ref):
            lv = nodes[ref][0]
            return nvars if lv == _TERMINAL else lv

        def count(ref):
            # assignments over levels [level_of(ref), nvars); counts are
            # Python ints on purpose, they outgrow 64 bits quickly
            if ref == 1:
                return 1
            if ref == 0:
                return 0
            found = memo.get(ref)
            if found is not None:
                return found
            lv, low, high = nodes[ref]
            if lv >= nvars:
                raise ValueError("support extends beyond the counted variables")
            result = (count(low) << (level_of(low) - lv - 1)) + (
                count(high) << (level_of(high) - lv - 1)
            )
            memo[ref] = result
            return result

        return count(f) << level_of(f)

    def support(self, int f):
        """Sorted tuple of levels the function depends on."""
        seen = set()
        levels = set()
        stack = [f]
        while stack:
            ref = stack.pop()
            if ref <= 1 or ref in seen:
                continue
            seen.add(ref)
            lv, low, high = self._nodes[ref]
            levels.add(lv)
            stack.append(low)
            stack.append(high)
        return tuple(sorted(levels))

    def evaluate(self, int f, true_levels):
        """Truth of ``f`` when exactly the levels in ``true_levels`` are 1."""
        cdef int lv, low, high
        while f > 1:
            lv, low, high = self._nodes[f]
            f = high if lv in true_levels else low
        return f == 1

    def some_solution(self, int f):
        """A satisfying partial assignment {level: bool}, or None."""
        if f == 0:
            return None
        out = {}
        cdef int lv, low, high
        while f != 1:
            lv, low, high = self._nodes[f]
            if low != 0:
                out[lv] = False
                f = low
            else:
                out[lv] = True
                f = high
        return out

    def audit(self):
        """Independent structural re-check of the reduction invariants."""
        problems = []
        seen_keys = set()
        cdef Py_ssize_t ref
        for ref in range(2, len(self._nodes)):
            lv, low, high = self._nodes[ref]
            if low == high:
                problems.append(f"node {ref}: low == high")
            for child in (low, high):
                if child > 1 and self._nodes[child][0] <= lv:
                    problems.append(f"node {ref}: child level not below parent")
            key = (lv, low, high)
            if key in seen_keys:
                problems.append(f"node {ref}: duplicate (var, low, high) triple")
            seen_keys.add(key)
            if self._unique.get(key) != ref:
                problems.append(f"node {ref}: unique table disagrees")
        return problems
