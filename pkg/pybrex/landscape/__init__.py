from .lrip import lrip_delta
from .brsc import BrscCertificate, brsc_ls, brsc_kl_constructive, brsc_empirical
from .regions import SafeRegion, safe_ball, kl_region, kl_region_membership, derive_box_bound
from .intervals import LambdaInterval, interval_l2, interval_ls, interval_kl, prior_work_interval, f_kl
from .conditions import ConditionReport, global_minimizer_check, local_minimizer_check

__all__ = [
    "lrip_delta",
    "BrscCertificate",
    "brsc_ls",
    "brsc_kl_constructive",
    "brsc_empirical",
    "SafeRegion",
    "safe_ball",
    "kl_region",
    "kl_region_membership",
    "derive_box_bound",
    "LambdaInterval",
    "interval_l2",
    "interval_ls",
    "interval_kl",
    "prior_work_interval",
    "f_kl",
    "ConditionReport",
    "global_minimizer_check",
    "local_minimizer_check",
]
