"""Independent sympy computations of values frozen into the C++ tests.

Run: python3 tools/oracle/derived_values.py
Nothing here imports the C++ engine; results are printed in the engine's
text syntax and pasted into tests/derived_values.hpp.
"""
import sympy as sp

x, u, p, q, r, s, t = sp.symbols("x u p q r s t")
a = sp.symbols("a1:16")
jets = [x, u, p, q, r, s, t]


def d1(coeffs):
    """Exterior derivative of a 1-form given as {var: coeff}; returns {(i, j): c} with i < j."""
    out = {}
    for i, vi in enumerate(jets):
        for j, vj in enumerate(jets):
            if i < j:
                c = sp.diff(coeffs.get(vj, 0), vi) - sp.diff(coeffs.get(vi, 0), vj)
                c = sp.simplify(c)
                if c != 0:
                    out[(str(vi), str(vj))] = c
    return out


print("# d((du - p dx)/u)")
print(d1({u: 1 / u, x: -p / u}))

print("# structure-group inverse, lower-triangular fill-in")
G = sp.eye(7)
pos = {1: (0, 0), 2: (2, 1), 3: (2, 2), 4: (3, 1), 5: (3, 2), 6: (3, 3), 7: (4, 1), 8: (4, 2), 9: (4, 3),
       10: (4, 4), 11: (5, 1), 12: (5, 2), 13: (5, 3), 14: (5, 4), 15: (5, 5)}
for l, (i, j) in pos.items():
    G[i, j] = a[l - 1]
Gi = G.inv()
for i in range(7):
    for j in range(7):
        if Gi[i, j] != 0 and i != j:
            print(f"inv[{i}][{j}] =", sp.factor(Gi[i, j]))
print("det =", sp.factor(G.det()))

print("# I1 at f4 = 0, u = 1, p = 2")
f4 = sp.Symbol("f4")
I1 = -(f4 * u + 3 * p) / u ** sp.Rational(4, 5)
print(I1.subs({f4: 0, u: 1, p: 2}))
print("# dI1/dp =", sp.simplify(sp.diff(I1, p)))

print("# worked example, direct: dI for I = t + (Q(x) - lam*a^5) u")
Q = sp.Function("Q")
lam, A = sp.symbols("lam a")
I = t + (Q(x) - lam * A ** 5) * u
print({str(v): sp.simplify(sp.diff(I, v)) for v in jets if sp.diff(I, v) != 0})

print("# f4 shift by c changes I1 by")
c = sp.Symbol("c")
print(sp.simplify(I1.subs(f4, f4 + c) - I1))
