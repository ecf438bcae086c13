"""Slant spectra and the taxonomy verdicts.

The slant data of a component D_i at a point is read off the eigenvalues of
the restricted square f^2|D_i: every eigenvalue lambda satisfies
eps * lambda = cos(theta)^2 for the slant value theta at that point. A valid
component carries exactly one eigenvalue cluster; the full spectrum of f^2|D
clustered per point drives the generic / skew-CR / CR style verdicts.

Constancy and distinctness are decided over the finite sample set only and
every report says so; the underlying definitions quantify over the whole
manifold, which a numerical tool cannot certify.

Verdict vocabulary (the implication lattice is in taxonomy.VERDICT_LATTICE):

* ``k-slant``: every proper component has a constant slant value and the
  values are pairwise distinct at every sampled point.
* ``k-pointwise-slant``: the slant functions are pairwise distinct as
  functions (some sampled point separates each pair).
* ``pointwise-k-slant``: the slant values are pairwise distinct at every
  sampled point.
* ``generic``: the clustered spectrum has point-independent cluster count and
  multiplicities, clusters at 0 or eps stay there at every point, at least
  one interior cluster is strictly pointwise (non-constant), matched clusters
  stay separated at every point, and (with a declared decomposition) the
  pointwise-k-slant verdict holds, so the lattice cannot break.
* ``skew-CR``: constant eigenvalue functions with constant multiplicities and
  at least one interior cluster (not reducible to CR or anti-invariant).
"""

from __future__ import annotations

import math

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .distribution import Decomposition, check_f_invariance
from .errors import ComponentError, InvariantError, ModelError, SpecError
from .linalg import complement_columns, mgs_columns, sym_eigen
from .sampling import DEFAULT_SEED
from .structure import StructureField

HALF_PI = math.pi / 2.0


def _lambda_to_alpha_theta(lam: float, epsilon: int, band: float) -> tuple[float, float]:
    s = epsilon * lam
    if s < -band or s > 1.0 + band:
        raise ModelError(
            f"eps*lambda = {s} outside [0, 1] beyond the tolerance band; "
            "structure or decomposition is invalid")
    alpha = math.sqrt(min(max(s, 0.0), 1.0))
    return alpha, math.acos(min(1.0, max(0.0, alpha)))


def cluster_eigenvalues(evals: np.ndarray, cluster_tol: float) -> list[list[int]]:
    """Greedy ascending clustering: a new cluster starts at a gap > tol."""
    order = np.argsort(evals)
    groups: list[list[int]] = []
    for idx in order:
        if groups and evals[idx] - evals[groups[-1][-1]] <= cluster_tol:
            groups[-1].append(int(idx))
        else:
            groups.append([int(idx)])
    return groups


class SlantCluster:
    __slots__ = ("lam", "alpha", "theta", "multiplicity", "eigenbasis")

    def __init__(self, lam, alpha, theta, multiplicity, eigenbasis):
        self.lam = lam
        self.alpha = alpha
        self.theta = theta
        self.multiplicity = multiplicity
        self.eigenbasis = eigenbasis  # ambient n x multiplicity, orthonormal

    def to_json_dict(self) -> dict:
        return {"lambda": self.lam, "alpha": self.alpha, "theta": self.theta,
                "multiplicity": self.multiplicity}


class SlantSpectrum:
    """Clustered eigen-data of f^2|D at one point, lambda ascending."""

    def __init__(self, point: np.ndarray, clusters: list[SlantCluster]):
        self.point = point
        self.clusters = clusters

    def to_json_dict(self) -> dict:
        return {"point": self.point.tolist(),
                "clusters": [c.to_json_dict() for c in self.clusters]}


def _spectrum_of_matrix(mat: np.ndarray, basis: np.ndarray, point: np.ndarray,
                        epsilon: int, cluster_tol: float, band: float) -> SlantSpectrum:
    evals, evecs = sym_eigen(mat)
    clusters = []
    for group in cluster_eigenvalues(evals, cluster_tol):
        lam = float(np.mean(evals[group]))
        alpha, theta = _lambda_to_alpha_theta(lam, epsilon, band)
        clusters.append(SlantCluster(lam, alpha, theta, len(group), basis @ evecs[:, group]))
    return SlantSpectrum(point, clusters)


def slant_spectrum(dec: Decomposition, point, cluster_tol: float | None = None,
                   tolerances: Tolerances = DEFAULT_TOLERANCES) -> SlantSpectrum:
    """Clustered spectrum of f^2 restricted to the whole of D at one point."""
    ct = tolerances.cluster if cluster_tol is None else cluster_tol
    frame = dec.frame_at(point)
    return _spectrum_of_matrix(frame.f2_full(), frame.basis_d, frame.x,
                               frame.epsilon, ct, tolerances.lambda_band)


def component_slant(dec: Decomposition, point, index: int,
                    tolerances: Tolerances = DEFAULT_TOLERANCES) -> SlantCluster:
    """Single slant cluster of component `index`; ComponentError when the
    component holds more than one eigenvalue cluster."""
    frame = dec.frame_at(point)
    spec = _spectrum_of_matrix(frame.f2_component(index), frame.bases[index], frame.x,
                               frame.epsilon, tolerances.cluster, tolerances.lambda_band)
    if len(spec.clusters) != 1:
        name = dec.components[index].name
        lams = [c.lam for c in spec.clusters]
        raise ComponentError(
            f"component {name!r} carries {len(spec.clusters)} eigenvalue clusters "
            f"{lams} at {frame.x.tolist()}; the declared decomposition is coarser "
            "than the eigenstructure")
    return spec.clusters[0]


def slant_function_table(dec: Decomposition, index: int, points,
                         tolerances: Tolerances = DEFAULT_TOLERANCES) -> list[tuple[np.ndarray, float]]:
    """Tabulate the slant value of one component over the sample points."""
    out = []
    for point in points:
        cluster = component_slant(dec, point, index, tolerances)
        out.append((dec.frame_at(point).x, cluster.theta))
    return out


# ---------------------------------------------------------------------------
# Cluster tracks across points (for generic / skew-CR / CR verdicts)
# ---------------------------------------------------------------------------

class _ClusterTracks:
    """Clusters matched across points by ascending-lambda order; only valid
    when count and multiplicity vectors agree at every point."""

    def __init__(self, spectra: list[SlantSpectrum], epsilon: int, tolerances: Tolerances):
        self.ok = True
        self.witness: dict | None = None
        counts = [len(s.clusters) for s in spectra]
        if len(set(counts)) != 1:
            self.ok = False
            bad = counts.index(min(counts)) if min(counts) != counts[0] else counts.index(max(counts))
            self.witness = {"reason": "cluster count varies with the point",
                            "counts": counts, "point": spectra[bad].point.tolist()}
            return
        mults = [tuple(c.multiplicity for c in s.clusters) for s in spectra]
        if len(set(mults)) != 1:
            self.ok = False
            bad = next(i for i, m in enumerate(mults) if m != mults[0])
            self.witness = {"reason": "cluster multiplicities vary with the point",
                            "multiplicities": [list(m) for m in mults],
                            "point": spectra[bad].point.tolist()}
            return
        self.count = counts[0]
        ztol = tolerances.cluster
        self.lambdas = np.array([[c.lam for c in s.clusters] for s in spectra])
        self.thetas = np.array([[c.theta for c in s.clusters] for s in spectra])
        self.alphas = np.array([[c.alpha for c in s.clusters] for s in spectra])
        # per (point, track) type: zero / one / interior
        self.types = []
        for row in self.lambdas:
            self.types.append(["zero" if abs(l) <= ztol
                               else "one" if abs(l - epsilon) <= ztol
                               else "interior" for l in row])


def _analyze_tracks(spectra, epsilon, tolerances, points):
    """Generic / skew-CR / CR / anti-invariant ingredients from the clustered
    full spectra."""
    tracks = _ClusterTracks(spectra, epsilon, tolerances)
    info = {
        "tracks_ok": tracks.ok,
        "witness": tracks.witness,
        "type_stable": False,
        "strictly_pointwise": False,
        "all_constant": False,
        "separated_everywhere": False,
        "interior_exists": False,
        "all_special": False,
        "all_zero": False,
        "alpha_flags": [],
    }
    if not tracks.ok:
        return info
    npts, ntracks = tracks.thetas.shape
    types_by_track = [set(tracks.types[p][t] for p in range(npts)) for t in range(ntracks)]
    info["type_stable"] = all(len(ts) == 1 for ts in types_by_track)
    if not info["type_stable"]:
        t_bad = next(t for t in range(ntracks) if len(types_by_track[t]) > 1)
        # witness: where the special value is attained (that point breaks the
        # point-independence of the 0 / eps eigenvalues)
        special = [p for p in range(npts) if tracks.types[p][t_bad] in ("zero", "one")]
        p_bad = special[0] if special else next(
            p for p in range(npts) if tracks.types[p][t_bad] != tracks.types[0][t_bad])
        info["witness"] = {"reason": "a cluster attains 0 or eps at some points only",
                           "track": t_bad, "point": np.asarray(
                               getattr(points[p_bad], "coords", points[p_bad])).tolist()}
    interior = [t for t in range(ntracks) if types_by_track[t] == {"interior"}]
    info["interior_exists"] = bool(interior)
    info["all_special"] = info["type_stable"] and not interior
    info["all_zero"] = all(ts == {"zero"} for ts in types_by_track)
    theta_span = tracks.thetas.max(axis=0) - tracks.thetas.min(axis=0)
    info["all_constant"] = bool(np.all(theta_span <= tolerances.angle_const))
    info["strictly_pointwise"] = any(theta_span[t] > tolerances.angle_const for t in interior)
    sep = True
    sep_witness = None
    for p in range(npts):
        row = tracks.thetas[p]
        for a in range(ntracks):
            for b in range(a + 1, ntracks):
                if abs(row[a] - row[b]) <= tolerances.angle_distinct:
                    sep = False
                    sep_witness = {"reason": "matched clusters not separated",
                                   "point": np.asarray(
                                       getattr(points[p], "coords", points[p])).tolist()}
                    break
            if not sep:
                break
        if not sep:
            break
    info["separated_everywhere"] = sep
    if not sep and info["witness"] is None:
        info["witness"] = sep_witness
    margin = tolerances.alpha_margin
    for t in interior:
        amin = float(tracks.alphas[:, t].min())
        amax = float(tracks.alphas[:, t].max())
        if amin < margin or amax > 1.0 - margin:
            info["alpha_flags"].append(
                {"track": t, "alpha_min": amin, "alpha_max": amax,
                 "note": f"alpha within {margin} of 0 or 1; the open-interval "
                         "requirement is decided up to this margin"})
    info["sep_witness"] = sep_witness
    return info


# ---------------------------------------------------------------------------
# Classification of a declared decomposition
# ---------------------------------------------------------------------------

class ClassificationReport:
    def __init__(self, points, components, labels, evidence, named_cases,
                 spectra, alpha_flags, seed, tolerances: Tolerances, k: int):
        self.points = points
        self.components = components      # display-ordered list of dicts
        self.labels = labels              # label -> bool
        self.evidence = evidence          # label -> witness dict (failures)
        self.named_cases = named_cases
        self.spectra = spectra            # list of SlantSpectrum
        self.alpha_flags = alpha_flags
        self.seed = seed
        self.tolerances = tolerances
        self.k = k
        self.scope_note = "constancy/distinctness verdicts hold on sampled points only"

    def passed_labels(self) -> list[str]:
        return sorted([l for l, ok in self.labels.items() if ok])

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "seed": self.seed,
            "scope": self.scope_note,
            "points": [np.asarray(p).tolist() for p in self.points],
            "components": self.components,
            "labels": {k: self.labels[k] for k in sorted(self.labels)},
            "named_cases": sorted(self.named_cases),
            "evidence": {k: self.evidence[k] for k in sorted(self.evidence)},
            "alpha_flags": self.alpha_flags,
            "spectra": [s.to_json_dict() for s in self.spectra],
        }


def _pairwise_separated(values: np.ndarray, tol: float) -> bool:
    k = values.shape[0]
    for a in range(k):
        for b in range(a + 1, k):
            if abs(values[a] - values[b]) <= tol:
                return False
    return True


def classify(dec: Decomposition, points, tolerances: Tolerances = DEFAULT_TOLERANCES,
             seed: int = DEFAULT_SEED, invariance_trials: int = 10) -> ClassificationReport:
    """Classify a declared decomposition over the sample points."""
    points = list(points)
    if len(points) < 2:
        raise SpecError("classification needs at least two sample points")
    inv_report = check_f_invariance(dec, points, trials=invariance_trials,
                                    tol=tolerances.invariance, seed=seed)
    if not inv_report.passed:
        raise ModelError(f"f-invariance violated: {inv_report.witness}")

    comps = dec.components
    ncomp = len(comps)
    inv_idx = 0 if dec.invariant is not None else None
    theta = np.empty((len(points), ncomp))
    lam = np.empty((len(points), ncomp))
    for pi, point in enumerate(points):
        for ci in range(ncomp):
            cl = component_slant(dec, point, ci, tolerances)
            theta[pi, ci] = cl.theta
            lam[pi, ci] = cl.lam

    # per-component verdicts
    comp_entries = []
    measured_invariant = []
    for ci, comp in enumerate(comps):
        col = theta[:, ci]
        if float(col.max()) <= tolerances.angle_const:
            verdict = "invariant"
        elif float(col.max() - col.min()) <= tolerances.angle_const:
            verdict = "slant"
        else:
            verdict = "pointwise-slant"
        measured_invariant.append(verdict == "invariant")
        comp_entries.append({
            "name": comp.name,
            "rank": comp.rank,
            "declared_invariant": ci == inv_idx,
            "verdict": verdict,
            "theta": [float(t) for t in col],
            "lambda": [float(l) for l in lam[:, ci]],
        })

    proper_idx = [ci for ci in range(ncomp) if ci != inv_idx]
    k = len(proper_idx)
    evidence: dict[str, dict] = {}

    invariant_ok = inv_idx is None or measured_invariant[inv_idx]
    if not invariant_ok:
        evidence["invariant-component"] = {
            "reason": f"declared invariant component {comps[inv_idx].name!r} measures "
                      "a nonzero slant value",
            "max_theta": float(theta[:, inv_idx].max())}

    positivity_ok = True
    for ci in proper_idx:
        bad = np.flatnonzero(theta[:, ci] <= tolerances.angle_const)
        if bad.size:
            positivity_ok = False
            evidence.setdefault("proper-positivity", {
                "reason": f"proper component {comps[ci].name!r} has slant value 0",
                "point": np.asarray(getattr(points[bad[0]], "coords",
                                            points[bad[0]])).tolist()})
            break

    prop_theta = theta[:, proper_idx] if proper_idx else np.zeros((len(points), 0))
    all_constant = all(
        float(prop_theta[:, j].max() - prop_theta[:, j].min()) <= tolerances.angle_const
        for j in range(k))

    # pointwise-k-slant: pairwise distinct at every sampled point
    pks = invariant_ok and positivity_ok and k > 0
    for pi in range(len(points)):
        if not pks:
            break
        if not _pairwise_separated(prop_theta[pi], tolerances.angle_distinct):
            pks = False
            evidence["pointwise-k-slant"] = {
                "reason": "slant values coincide at a sampled point",
                "point": np.asarray(getattr(points[pi], "coords", points[pi])).tolist(),
                "theta": [float(t) for t in prop_theta[pi]]}
    if k == 0 and "pointwise-k-slant" not in evidence:
        evidence["pointwise-k-slant"] = {"reason": "no proper component"}

    # k-pointwise-slant: distinct as functions (some sampled point separates)
    kps = invariant_ok and positivity_ok and k > 0
    for a in range(k):
        if not kps:
            break
        for b in range(a + 1, k):
            gap = np.abs(prop_theta[:, a] - prop_theta[:, b])
            if float(gap.max(initial=0.0)) <= tolerances.angle_distinct:
                kps = False
                evidence["k-pointwise-slant"] = {
                    "reason": "two slant functions agree at every sampled point",
                    "components": [comps[proper_idx[a]].name, comps[proper_idx[b]].name]}
                break
    if k == 0:
        kps = False
        evidence.setdefault("k-pointwise-slant", {"reason": "no proper component"})

    kslant = all_constant and pks
    if not kslant and "k-slant" not in evidence:
        evidence["k-slant"] = (
            {"reason": "a slant function is not constant on the sampled points"}
            if not all_constant else
            evidence.get("pointwise-k-slant", {"reason": "not pointwise separated"}))

    # clustered full-spectrum analysis
    spectra = [slant_spectrum(dec, p, tolerances=tolerances) for p in points]
    tr = _analyze_tracks(spectra, dec.structure.epsilon, tolerances, points)

    generic = (tr["tracks_ok"] and tr["type_stable"] and tr["strictly_pointwise"]
               and tr["separated_everywhere"] and pks)
    if not generic:
        if not tr["tracks_ok"] or not tr["type_stable"] or not tr["separated_everywhere"]:
            evidence["generic"] = tr["witness"] or {"reason": "cluster structure unstable"}
        elif not tr["strictly_pointwise"]:
            evidence["generic"] = {"reason": "no strictly pointwise eigenvalue function "
                                             "with alpha inside (0, 1)"}
        else:
            evidence["generic"] = evidence.get("pointwise-k-slant",
                                               {"reason": "declared components not separated"})

    skew_cr = tr["tracks_ok"] and tr["all_constant"] and tr["interior_exists"]
    if not skew_cr:
        evidence["skew-CR"] = (tr["witness"] if not tr["tracks_ok"]
                               else {"reason": "eigenvalue functions not constant"}
                               if not tr["all_constant"]
                               else {"reason": "reducible to a CR or anti-invariant structure"})

    cr = tr["tracks_ok"] and tr["all_special"]
    anti = tr["tracks_ok"] and tr["all_zero"]
    proper_label = inv_idx is None and not any(measured_invariant)

    labels = {
        "k-slant": kslant,
        "k-pointwise-slant": kps,
        "pointwise-k-slant": pks,
        "generic": generic,
        "skew-CR": skew_cr,
        "CR": cr,
        "anti-invariant": anti,
        "proper": proper_label,
    }

    named = _named_cases(labels, k, inv_idx is not None and invariant_ok,
                         prop_theta, tolerances)

    _assert_lattice(labels)

    display = _display_order(comp_entries)
    return ClassificationReport(points, display, labels, evidence, named, spectra,
                                tr["alpha_flags"], seed, tolerances, k)


def _named_cases(labels, k, has_invariant, prop_theta, tolerances) -> list[str]:
    """Classical names for small k, assigned from the measured verdicts."""
    named = []
    if prop_theta.size == 0:
        return named
    first = prop_theta[0]
    is_half_pi = [abs(t - HALF_PI) <= tolerances.angle_const for t in first]
    theta_const = [float(prop_theta[:, j].max() - prop_theta[:, j].min())
                   <= tolerances.angle_const for j in range(k)]
    if labels["k-slant"]:
        if k == 1:
            if has_invariant:
                named.append("semi-invariant" if is_half_pi[0] else "semi-slant")
            elif is_half_pi[0]:
                named.append("anti-invariant")
        elif k == 2:
            if has_invariant:
                named.append("almost-bi-slant")
            else:
                named.append("bi-slant")
                if any(is_half_pi):
                    named.append("hemi-slant")
    elif labels["pointwise-k-slant"]:
        if k == 1 and has_invariant and not (theta_const[0] and is_half_pi[0]):
            named.append("pointwise semi-slant")
        elif k == 2 and not has_invariant:
            named.append("pointwise bi-slant")
            if any(theta_const[j] and is_half_pi[j] for j in range(k)):
                named.append("pointwise hemi-slant")
    return named


def _assert_lattice(labels: dict):
    from .taxonomy import VERDICT_LATTICE
    for src, targets in VERDICT_LATTICE.items():
        if labels.get(src):
            for dst in targets:
                if not labels.get(dst):
                    raise InvariantError(
                        f"verdict lattice violated: {src} holds but {dst} does not")


def _display_order(entries: list[dict]) -> list[dict]:
    """Invariant components first, then ascending slant value at the first
    sample point; deterministic."""
    def sort_key(e):
        return (0 if e["verdict"] == "invariant" else 1, e["theta"][0], e["name"])
    return sorted(entries, key=sort_key)


# ---------------------------------------------------------------------------
# Discovery mode: no declared decomposition
# ---------------------------------------------------------------------------

def discover(structure: StructureField, points, mask: tuple[int, ...] | None = None,
             tolerances: Tolerances = DEFAULT_TOLERANCES,
             seed: int = DEFAULT_SEED) -> ClassificationReport:
    """Classify with candidate components given by the eigenvalue clusters of
    the full restricted square, exactly the eigenspace decomposition the
    skew-CR and generic descriptions build.

    D is the tangent space of the masked linear subspace (the whole ambient
    space without a mask), minus the span of xi in the contact-like case.
    """
    points = list(points)
    if len(points) < 2:
        raise SpecError("classification needs at least two sample points")
    n = structure.n
    free = [i - 1 for i in (mask or range(1, n + 1))]
    spectra = []
    for point in points:
        x = np.asarray(getattr(point, "coords", point), dtype=float)
        g = structure.metric_at(x)
        phi = structure.phi_at(x)
        tm = np.eye(n)[:, free]
        if structure.is_contact:
            xi = structure.xi_at(x)
            # xi must live inside TM for the decomposition to make sense
            proj_tm = tm @ np.linalg.solve(tm.T @ g @ tm, tm.T @ g)
            if float(np.linalg.norm(proj_tm @ xi - xi)) > 1e-9 * float(np.linalg.norm(xi)):
                raise SpecError("xi does not lie inside the masked tangent space")
            inside = complement_columns(g, mgs_columns(g, xi[:, None]))
            # restrict the complement of <xi> back into TM before extracting D
            cand = proj_tm @ inside
            basis_d = mgs_columns(g, _column_select(g, cand, len(free) - 1))
        else:
            basis_d = mgs_columns(g, tm)
        proj_d = basis_d @ basis_d.T @ g
        op = proj_d @ phi
        mat = basis_d.T @ g @ (op @ (op @ basis_d))
        mat = 0.5 * (mat + mat.T)
        spectra.append(_spectrum_of_matrix(mat, basis_d, x, structure.epsilon,
                                           tolerances.cluster, tolerances.lambda_band))

    tr = _analyze_tracks(spectra, structure.epsilon, tolerances, points)
    if not tr["tracks_ok"]:
        raise ComponentError(f"eigenstructure is not stable across points: {tr['witness']}")

    thetas = np.array([[c.theta for c in s.clusters] for s in spectra])
    ntracks = thetas.shape[1]
    comp_entries = []
    inv_flags = []
    for t in range(ntracks):
        col = thetas[:, t]
        if float(col.max()) <= tolerances.angle_const:
            verdict = "invariant"
        elif float(col.max() - col.min()) <= tolerances.angle_const:
            verdict = "slant"
        else:
            verdict = "pointwise-slant"
        inv_flags.append(verdict == "invariant")
        comp_entries.append({
            "name": f"C{t + 1}",
            "rank": spectra[0].clusters[t].multiplicity,
            "declared_invariant": False,
            "verdict": verdict,
            "theta": [float(v) for v in col],
            "lambda": [float(s.clusters[t].lam) for s in spectra],
        })

    proper_tracks = [t for t in range(ntracks) if not inv_flags[t]]
    k = len(proper_tracks)
    prop_theta = thetas[:, proper_tracks] if proper_tracks else np.zeros((len(points), 0))
    evidence: dict[str, dict] = {}

    pks = k > 0 and all(_pairwise_separated(prop_theta[p], tolerances.angle_distinct)
                        for p in range(len(points)))
    if not pks:
        evidence["pointwise-k-slant"] = tr.get("sep_witness") or {"reason": "no proper cluster"}
    kps = k > 0 and all(
        float(np.abs(prop_theta[:, a] - prop_theta[:, b]).max()) > tolerances.angle_distinct
        for a in range(k) for b in range(a + 1, k))
    if not kps:
        evidence["k-pointwise-slant"] = {"reason": "two cluster slant functions agree "
                                                   "at every sampled point"}
    all_constant = all(float(prop_theta[:, j].max() - prop_theta[:, j].min())
                       <= tolerances.angle_const for j in range(k))
    kslant = all_constant and pks
    if not kslant:
        evidence.setdefault("k-slant", {"reason": "cluster slant functions not constant "
                                                  "and separated on sampled points"})
    generic = (tr["type_stable"] and tr["strictly_pointwise"]
               and tr["separated_everywhere"])
    if not generic:
        evidence["generic"] = tr["witness"] or {
            "reason": "no strictly pointwise eigenvalue function with alpha inside (0, 1)"}
    skew_cr = tr["all_constant"] and tr["interior_exists"]
    if not skew_cr:
        evidence["skew-CR"] = {"reason": "eigenvalue functions not constant or no "
                                         "interior cluster"}
    labels = {
        "k-slant": kslant,
        "k-pointwise-slant": kps,
        "pointwise-k-slant": pks,
        "generic": generic,
        "skew-CR": skew_cr,
        "CR": tr["all_special"],
        "anti-invariant": tr["all_zero"],
        "proper": not any(inv_flags),
    }
    named = _named_cases(labels, k, any(inv_flags), prop_theta, tolerances)
    _assert_lattice(labels)
    return ClassificationReport(points, _display_order(comp_entries), labels, evidence,
                                named, spectra, tr["alpha_flags"], seed, tolerances, k)


def _column_select(g: np.ndarray, cand: np.ndarray, rank: int) -> np.ndarray:
    """Pick `rank` columns of cand by pivoted g-norm deflation."""
    cand = np.array(cand, dtype=float)
    out = np.empty((cand.shape[0], rank))
    for j in range(rank):
        norms = np.sqrt(np.maximum(np.einsum("ij,ik,kj->j", cand, g, cand), 0.0))
        idx = int(np.argmax(norms))
        q = cand[:, idx] / max(norms[idx], 1e-300)
        out[:, j] = q
        cand -= np.outer(q, q @ g @ cand)
    return out
