"""Soft-output ordered-statistics decoding and NOMA joint-decoding receivers."""
from .channel import (
    ChannelRealization,
    Frame,
    PowerProfile,
    deinterleave,
    draw_channel,
    interleave,
    make_frame,
    make_interleaver,
    modulate_bpsk,
    snr_to_sigma,
    transmit,
)
from .codes import Code, CodeError, build_ebch, gaussian_eliminate, load_code, resolve_code, save_code
from .lcsosd import LcSosdParams, SoftDecision, lc_sosd_decode, success_prob, tep_prior
from .osd import enumerate_teps, hard_decision, num_teps, order_received, osd_decode, reencode, whd
from .receivers import (
    JdParams,
    JdResult,
    dc_combine,
    dsc_combine,
    jd_receive,
    pic_extrinsic,
    pic_prior_stats,
    posterior_decision,
    sic_receive,
)

__version__ = "0.1.0"
