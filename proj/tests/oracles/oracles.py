"""Independent high-precision oracles (mpmath) whose outputs are frozen into the C++ tests."""
import mpmath as mp
mp.mp.dps = 30

def well_abs_lambda(a, v):
    # tan(a*sqrt(2(v-k))) = sqrt(k/(v-k)), k in (0, v), with a*sqrt(2(v-k)) < pi/2
    f = lambda k: mp.tan(a*mp.sqrt(2*(v-k))) - mp.sqrt(k/(v-k))
    lo = max(mp.mpf(0), v - (mp.pi/2/a)**2/2) + mp.mpf('1e-25')
    hi = v - mp.mpf('1e-25')
    return mp.findroot(f, (lo, hi), solver='bisect', tol=1e-28, maxsteps=400)

def symbol_generic_d1(alpha, gamma, xi):
    # 2 * int_0^inf (1-cos(xi r)) f(r) dr, f = r^{-1-alpha} (r<=1), r^{-gamma} (r>1)
    a = mp.quad(lambda r: (1-mp.cos(xi*r))*r**(-1-alpha), [0, 1])
    b = mp.quadosc(lambda r: (1-mp.cos(xi*r))*r**(-gamma), [1, mp.inf], omega=xi)
    return 2*(a+b)

def relativistic_symbol_quad(alpha, m, xi):
    # nu(z) for d=1 relativistic stable with psi = (xi^2 + m^{2/alpha})^{alpha/2} - m
    c = alpha*2**((alpha-1)/2)*m**((1+alpha)/(2*alpha))/(mp.sqrt(mp.pi)*mp.gamma(1-alpha/2))
    nu = lambda z: c*mp.besselk((1+alpha)/2, m**(1/alpha)*z)/z**((1+alpha)/2)
    return 2*mp.quad(lambda z: (1-mp.cos(xi*z))*nu(z), [0, 1, 10, mp.inf])

def jump_paring_ratio_d1(f, x):
    g = lambda y: f(abs(x-y))*f(abs(y))
    pts1 = [-mp.inf, -1, -0.5]
    mid = sorted(set([0.5, 1, x-1, x-0.5]))
    mid = [p for p in mid if 0.5 <= p <= x-0.5]
    pts3 = sorted(set([x+0.5, x+1]))
    s = mp.quad(g, pts1) + (mp.quad(g, mid) if len(mid) >= 2 else 0) + mp.quad(g, pts3 + [mp.inf])
    return s / f(x)

def prof(alpha, mu, beta, gamma, d=1):
    def f(r):
        r = mp.mpf(r)
        if r <= 1: return r**(-d-alpha)
        return mp.e**(-mu*r**beta)*r**(-gamma)
    return f

if __name__ == '__main__':
    for (a, v) in [(1, 1), (1, 2), (1, 4), (1, 100), (1, 1e4)]:
        k = well_abs_lambda(a, v)
        print(f"well a={a} v={v}: |lambda0|={mp.nstr(k, 20)}  v-|l|={mp.nstr(v-k, 12)}  rel_dev_from_pi2/8={mp.nstr((v-k)/(mp.pi**2/8)-1, 6)}")
    print("symbol L1 d=1 a=0.5 g=2.5 xi=1:", mp.nstr(symbol_generic_d1(0.5, 2.5, 1), 20))
    print("symbol L1 d=1 a=0.5 g=2.5 xi=3.7:", mp.nstr(symbol_generic_d1(0.5, 2.5, 3.7), 20))
    for xi in [0.5, 2.0]:
        print("relativistic a=1 m=1 xi", xi, mp.nstr(relativistic_symbol_quad(1, 1, xi), 20), "closed", mp.nstr(mp.sqrt(xi**2+1)-1, 20))
    for name, f in [("L1 g=3", prof(0.5, 0, 0, 3)), ("L3 mu=1 b=1 g=2", prof(0.5, 1, 1, 2)), ("b=2 mu=1 g=0", prof(0.5, 1, 2, 0))]:
        print(name, [mp.nstr(jump_paring_ratio_d1(f, x), 12) for x in [1, 2, 4, 8, 16]])
