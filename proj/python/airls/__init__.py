"""Online robust identification of linear systems (AIRLS, RTLS and RLS)."""

from ._airls import *  # noqa: F401,F403
from ._airls import __doc__  # noqa: F401


def estimator(kind, n=2, n_u=2, **settings):
    """Builds an estimator of the given kind ("airls", "rtls" or "rls").

    Keyword settings are copied onto the kind's config object; for AIRLS,
    ``psi`` sets the scale of the identity regularizer.
    """
    from . import _airls

    psi = settings.pop("psi", 1e-3)
    configs = {"airls": _airls.AirlsConfig, "rtls": _airls.RtlsConfig, "rls": _airls.RlsConfig}
    if kind not in configs:
        raise ValueError(f"unknown estimator kind {kind!r}")
    cfg = configs[kind]()
    for key, value in settings.items():
        if not hasattr(cfg, key):
            raise ValueError(f"{kind} has no setting {key!r}")
        setattr(cfg, key, value)
    if kind == "airls":
        return _airls.AirlsEstimator(n, n_u, cfg, psi)
    if kind == "rtls":
        return _airls.RtlsEstimator(n, n_u, cfg)
    return _airls.RlsEstimator(n, n_u, cfg)
