import argparse
import json
import math
import sys

import numpy as np

from . import bilinear, fixtures, geometry, harmonics, inversion, pipeline, rotation, triharmonic


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x) or math.isinf(x):
            return "null"
        return format(x, ".17g")
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_fmt(v)}" for k, v in x.items()) + "}"
    if isinstance(x, np.ndarray):
        return _fmt(x.tolist())
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    try:
        return _fmt(float(x))
    except (TypeError, ValueError):
        return json.dumps(str(x))


def dumps(obj):
    """JSON with every float written to 17 significant digits."""
    return _fmt(obj)


def _load(path):
    with open(path) as fh:
        return json.load(fh)


def _floats(text):
    return [float(v) for v in text.split(",") if v]


def load_patch(spec, domain=None):
    """``sphere`` for the two-chart round S^4, else a JSON file (polynomial terms or quadratic forms)."""
    if spec == "sphere":
        return fixtures.round_sphere_atlas()
    d = _load(spec)
    if d.get("kind") == "quadratic":
        return [fixtures.quadratic_graph(d["P"], d.get("Q"), domain=domain)]
    return [fixtures.load_immersion(d, domain=domain)]


def cmd_energy(a, out):
    domain = geometry.parse_domain(a.domain) if a.domain else None
    atlas = load_patch(a.immersion, domain)
    quad = geometry.QuadSpec.order(a.quad)
    total = None
    for p in atlas:
        e = geometry.integrate_energy(p, domain or p.domain, quad)
        total = e if total is None else total + e
    out.write(dumps(total.as_dict(a.mu, a.nu)) + "\n")
    return True


def cmd_residue(a, out):
    patch = load_patch(a.immersion, geometry.ball(max(_floats(a.radii))))[0]
    out.write("r,value,value_plus_16pi2\n")
    for r in _floats(a.radii):
        v = inversion.residue_integral(patch, r, a.angular)
        out.write(f"{r:.17g},{v:.17g},{v - inversion.FLAT_RESIDUE:.17g}\n")
    return True


def cmd_invert(a, out):
    radii = _floats(a.radii)
    patch = load_patch(a.immersion, geometry.ball(a.outer))[0]
    rows = inversion.verify_energy_identity(patch, a.mu, a.nu, radii, a.outer,
                                           geometry.QuadSpec(a.quad, a.angular, radial_map="log"), a.angular)
    ok = True
    if a.verify:
        ok = all(abs(r["residual"]) <= a.tol * max(1.0, abs(r["lhs"])) for r in rows)
    out.write(dumps(dict(rows=rows, ok=ok)) + "\n")
    return ok


def cmd_triharmonic(a, out):
    f = _load(a.forms)
    m = np.asarray(f["P"]).reshape(4, 4, -1).shape[-1]
    P, Q = pipeline._as_tables(f["P"], f.get("Q"), m)
    R, S = pipeline._as_tables(f["R"], f.get("S"), m)
    coeffs = harmonics.form_coefficients(P, Q, R, S)
    it = triharmonic.solve_interpolant(coeffs, a.gamma, a.alpha, a.beta)
    out.write(dumps(dict(gamma=it.gamma, alpha=it.alpha, beta=it.beta, A=it.A, B=it.B, C=it.C, D=it.D)) + "\n")
    return True


def cmd_gram(a, out):
    sigma = "inf" if a.sigma in ("inf", "infinity") else float(a.sigma)
    G = bilinear.gram_matrix(a.family, sigma, a.tau, a.variant)
    res = dict(family=a.family, sigma=G.sigma, tau=G.tau, M=G.M, finite=G.finite.tolist())
    ok = True
    if a.quad_check:
        if sigma == "inf" or a.tau == 0:
            raise SystemExit("quadrature check needs a bounded annulus")
        Gq = bilinear.gram_by_quadrature(a.family, sigma, a.tau)
        gap = bilinear.gram_discrepancy(G, Gq)
        res["quadrature"] = Gq
        res["max_rel_diff"] = gap
        ok = gap <= 1e-8
    res["ok"] = ok
    out.write(dumps(res) + "\n")
    return ok


def cmd_rotate(a, out):
    P = rotation.as_form_tuple(_load(a.p))
    R = rotation.as_form_tuple(_load(a.r))
    res = rotation.search_S(P, R, a.restarts, a.seed)
    nonzero = np.linalg.norm(P) > rotation.NONZERO and np.linalg.norm(R) > rotation.NONZERO
    ok = res.pairing >= 0 and (not nonzero or res.pairing > 1e-10 * np.linalg.norm(P) * np.linalg.norm(R))
    out.write(dumps(dict(S=res.S, T=res.T, pairing=res.pairing, ok=bool(ok))) + "\n")
    return bool(ok)


def cmd_connect(a, out):
    spec = pipeline.ConnectedSumSpec.from_dict(_load(a.spec))
    rep = pipeline.run_connected_sum(spec)
    out.write(dumps(rep.as_dict()) + "\n")
    if a.csv:
        with open(a.csv, "w") as fh:
            fh.write("gamma,alpha,beta,exact_combination,leading,ratio,sign\n")
            for r in rep.rows:
                fh.write(",".join(format(float(v), ".17g") for v in vars(r).values()) + "\n")
    return rep.reduction_achieved if a.verify else True


def build_parser():
    ap = argparse.ArgumentParser(prog="willmore4")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("energy")
    p.add_argument("--immersion", required=True)
    p.add_argument("--domain")
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--nu", type=float, default=0.0)
    p.add_argument("--quad", type=int, default=32)
    p.set_defaults(fn=cmd_energy)

    p = sub.add_parser("residue")
    p.add_argument("--immersion", required=True)
    p.add_argument("--radii", default="0.1,0.01,0.001")
    p.add_argument("--angular", type=int, default=24)
    p.set_defaults(fn=cmd_residue)

    p = sub.add_parser("invert")
    p.add_argument("--immersion", required=True)
    p.add_argument("--radii", default="0.1,0.01")
    p.add_argument("--outer", type=float, default=0.5)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--nu", type=float, default=0.0)
    p.add_argument("--quad", type=int, default=24)
    p.add_argument("--angular", type=int, default=20)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(fn=cmd_invert)

    p = sub.add_parser("triharmonic")
    p.add_argument("--forms", required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.set_defaults(fn=cmd_triharmonic)

    p = sub.add_parser("gram")
    p.add_argument("--family", choices=list("EFGH"), required=True)
    p.add_argument("--sigma", default="1")
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--variant", default="corrected", choices=["corrected", "printed", "raw"])
    p.add_argument("--quad-check", action="store_true")
    p.set_defaults(fn=cmd_gram)

    p = sub.add_parser("rotate")
    p.add_argument("--p", required=True)
    p.add_argument("--r", required=True)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_rotate)

    p = sub.add_parser("connect")
    p.add_argument("--spec", required=True)
    p.add_argument("--csv")
    p.add_argument("--verify", action="store_true", help="exit nonzero unless a reduction is achieved")
    p.set_defaults(fn=cmd_connect)
    return ap


def main(argv=None, out=None):
    args = build_parser().parse_args(argv)
    ok = args.fn(args, out or sys.stdout)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
