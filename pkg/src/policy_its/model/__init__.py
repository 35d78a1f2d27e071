"""ITS design, parameter layout and the weighted log-posterior.

Import from the submodules (``policy_its.model.design``,
``policy_its.model.posterior``, ...); this package stays import-light so the
configuration layer can depend on ``policy_its.model.priors``.
"""
