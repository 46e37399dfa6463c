"""Symbolic reference values frozen into tests/oracles.rs.

Run with `python3 generate.py`; prints every value with 17 significant digits.
"""
import sympy as sp

N = 3
x = sp.symbols("x0:3", real=True)
r = sp.sqrt(sum(xi**2 for xi in x))
omega = {1: 2 * sp.pi, 2: 4 * sp.pi, 3: 2 * sp.pi**2}


def c_n(n):
    return 1 / (2 * (n - 1) * omega[n - 1])


def christoffel(g, coords):
    ginv = g.inv()
    n = len(coords)
    return [[[sp.Rational(1, 2) * sum(ginv[k, l] * (sp.diff(g[l, i], coords[j]) + sp.diff(g[l, j], coords[i]) - sp.diff(g[i, j], coords[l])) for l in range(n))
              for j in range(n)] for i in range(n)] for k in range(n)]


def ricci_at(g, coords, point):
    """Ricci tensor evaluated at a point; derivatives taken symbolically first."""
    n = len(coords)
    sub = dict(zip(coords, point))
    dg = [[[sp.diff(g[i, j], c) for c in coords] for j in range(n)] for i in range(n)]
    ddg = [[[[sp.diff(dg[i][j][a], coords[b]) for b in range(n)] for a in range(n)] for j in range(n)] for i in range(n)]
    G = sp.Matrix(n, n, lambda i, j: g[i, j].subs(sub)).evalf(30)
    Gi = G.inv()
    D = [[[dg[i][j][a].subs(sub).evalf(30) for a in range(n)] for j in range(n)] for i in range(n)]
    DD = [[[[ddg[i][j][a][b].subs(sub).evalf(30) for b in range(n)] for a in range(n)] for j in range(n)] for i in range(n)]
    # Γ_{lij} = ½(∂_i g_lj + ∂_j g_li − ∂_l g_ij), Γ^k_ij = g^{kl} Γ_{lij}
    low = lambda l, i, j: (D[l][j][i] + D[l][i][j] - D[i][j][l]) / 2
    gam = [[[sum(Gi[k, l] * low(l, i, j) for l in range(n)) for j in range(n)] for i in range(n)] for k in range(n)]
    # ∂_a Γ_{lij}
    dlow = lambda a, l, i, j: (DD[l][j][i][a] + DD[l][i][j][a] - DD[i][j][l][a]) / 2
    # ∂_a g^{kl} = −g^{kp} ∂_a g_pq g^{ql}
    dginv = lambda a, k, l: -sum(Gi[k, p] * D[p][q][a] * Gi[q, l] for p in range(n) for q in range(n))
    dgam = lambda a, k, i, j: sum(dginv(a, k, l) * low(l, i, j) + Gi[k, l] * dlow(a, l, i, j) for l in range(n))
    ric = sp.zeros(n, n)
    for i in range(n):
        for j in range(n):
            ric[i, j] = sum(dgam(k, k, i, j) - dgam(j, k, i, k) + sum(gam[k][k][l] * gam[l][i][j] - gam[k][j][l] * gam[l][i][k] for l in range(n)) for k in range(n))
    return G, Gi, gam, ric


def show(name, value):
    if isinstance(value, (list, tuple)):
        print(f"{name} = [{', '.join(f'{float(v):.17e}' for v in value)}]")
    else:
        print(f"{name} = {float(value):.17e}")


# Schwarzschild half-space: e = (u⁴ − 1)δ, charge flux with w = 1 on the
# hemisphere (the corner term vanishes since e(η, ϑ) ∝ δ(e_n, x'/r) = 0).
m, rr = sp.symbols("m r", positive=True)
u = 1 + m / (2 * rr)
f = u**4 - 1
# div e − d tr e = (1 − n) df, paired with μ = ∂_r
flux = c_n(N) * (1 - N) * sp.diff(f, rr) * omega[N - 1] / 2 * rr ** (N - 1)
flux = sp.simplify(flux)
print("schwarzschild flux(r) =", sp.factor(flux))
assert sp.simplify(flux - m / 2 * u**3) == 0
show("schwarzschild_mass_limit(m=1)", sp.limit(flux.subs(m, 1), rr, sp.oo))
show("schwarzschild_flux(m=1, r=4)", flux.subs({m: 1, rr: 4}))
# hemisphere area at r = 4 in the Schwarzschild metric, m = 1
show("schwarzschild_hemisphere_area(r=4)", (u**4).subs({m: 1, rr: 4}) * 2 * sp.pi * 16)

# Hyperbolic polar coordinates, n = 3: b = dρ² + sinh²ρ (dθ² + sin²θ dφ²)
rho, th, ph = sp.symbols("rho theta phi", positive=True)
b = sp.diag(1, sp.sinh(rho) ** 2, sp.sinh(rho) ** 2 * sp.sin(th) ** 2)
gam = christoffel(b, [rho, th, ph])
show("hyperbolic_gamma_rho_theta_theta(rho=1)", gam[0][1][1].subs(rho, 1))

# AdS-Schwarzschild: e = ψ dρ², ψ = cosh²ρ / (cosh²ρ − 2m sinh^{2−n}ρ) − 1.
# Charge U(μ) = W(div e − d tr e)(∂ρ) − e(∇W, ∂ρ) + tr e · dW(∂ρ), W = cosh ρ,
# divergence taken with the Christoffel symbols above.
psi = sp.cosh(rho) ** 2 / (sp.cosh(rho) ** 2 - 2 * m * sp.sinh(rho) ** (2 - N)) - 1
E = sp.diag(psi, 0, 0)
binv = b.inv()
coords = [rho, th, ph]
def cov_e(i, j, k):  # ∇_k e_ij
    return sp.diff(E[i, j], coords[k]) - sum(gam[l][k][i] * E[l, j] + gam[l][k][j] * E[i, l] for l in range(3))
div_rho = sum(binv[i, k] * cov_e(i, 0, k) for i in range(3) for k in range(3))
tr = sum(binv[i, j] * E[i, j] for i in range(3) for j in range(3))
W = sp.cosh(rho)
U = W * (div_rho - sp.diff(tr, rho)) - E[0, 0] * sp.diff(W, rho) + tr * sp.diff(W, rho)
charge = sp.simplify(c_n(N) * U * omega[N - 1] / 2 * sp.sinh(rho) ** (N - 1))
closed = m / 2 * sp.cosh(rho) ** 2 / (sp.cosh(rho) ** 2 - 2 * m * sp.sinh(rho) ** (2 - N))
assert sp.simplify(charge - closed) == 0
print("ads charge(rho) =", closed)
show("ads_mass_limit(m=1)", sp.limit(closed.subs(m, 1), rho, sp.oo))
show("ads_charge(m=1, rho=3)", closed.subs({m: 1, rho: 3}))

# generic_perturbation (n = 3, m = 1, amp = 0.3, τ = 0.8):
# g = u⁴δ + ∂_i Z_j + ∂_j Z_i with Z_j = amp x_n r^{−τ} (c_j + Σ_k B_jk x_k / r).
amp, tau = sp.Rational(3, 10), sp.Rational(4, 5)
c = [1, 0, 0]
B = [[0, 1, 0], [sp.Rational(1, 2), 0, 0], [0, 0, sp.Rational(3, 10)]]
Z = [amp * x[2] * r ** (-tau) * (c[j] + sum(B[j][k] * x[k] for k in range(3)) / r) for j in range(3)]
us = 1 + 1 / (2 * r)
g = sp.Matrix(3, 3, lambda i, j: (us**4 if i == j else 0) + sp.diff(Z[j], x[i]) + sp.diff(Z[i], x[j]))

p = [6, 0, 8]
G, Gi, gam_p, ric = ricci_at(g, x, p)
R = sum(Gi[i, j] * ric[i, j] for i in range(3) for j in range(3))
ein = ric - R / 2 * G
show("generic_einstein(6,0,8)", [ein[i, j] for i in range(3) for j in range(3)])
show("generic_scalar(6,0,8)", R)

# Newton tensor of the boundary at q = (4.8, 6.4, 0): Π_ab = Γ^n_ab / sqrt(g^{nn})
# for the defining function −x_n, J = Π − H σ on the tangents ∂_0, ∂_1.
q = [sp.Rational(24, 5), sp.Rational(32, 5), 0]
sub = dict(zip(x, q))
Gq = sp.Matrix(3, 3, lambda i, j: g[i, j].subs(sub)).evalf(30)
Dq = [[[sp.diff(g[i, j], x[a]).subs(sub).evalf(30) for a in range(3)] for j in range(3)] for i in range(3)]
Gqi = Gq.inv()
gam_n = lambda a, c: sum(Gqi[2, l] * (Dq[l][c][a] + Dq[l][a][c] - Dq[a][c][l]) / 2 for l in range(3))
Pi = sp.Matrix(2, 2, lambda a, c: gam_n(a, c)) / sp.sqrt(Gqi[2, 2])
sigma = Gq[:2, :2]
H = (sigma.inv() * Pi).trace()
J = Pi - H * sigma
show("generic_second_form(4.8,6.4,0)", list(Pi))
show("generic_mean_curvature(4.8,6.4,0)", H)
show("generic_newton(4.8,6.4,0)", list(J))
