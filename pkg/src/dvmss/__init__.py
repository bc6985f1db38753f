"""Dynamic, verifiable multi-secret sharing over binomial linear recursions.

Subshadows are encrypted to participants with a third-order LFSR public-key
cryptosystem and committed in a prime-order group so that both participants
and outside auditors can check the dealer.
"""

from .modmath import DlpGroup, FieldPoly, count_group_exps, gen_dlp_group, gen_prime, lagrange_fit
from .lfsr import LfsrParams, seq_eval, seq_pair
from .pkc import PkcPrivateKey, PkcPublicKey, pkc_decrypt, pkc_encrypt, pkc_keygen
from .nlr import NlrSpec, Variant, nlr_fit, nlr_generate
from .scheme import (Bulletin, CheatingDetected, DealerParams, DealerState, ParticipantRecord,
                     ReconstructionError, Share, add_participant, add_secret, deal, dealer_setup,
                     extract_subshadow, participant_enroll, privacy_sweep, reconstruct_method1,
                     reconstruct_method2, remove_participant, remove_secret, rethreshold,
                     update_secret, verify_bulletin, verify_participant, verify_share)
from .forgery import audit_full, audit_validity_only, forge_deal

__version__ = "0.1.0"

__all__ = [
    "DlpGroup",
    "FieldPoly",
    "count_group_exps",
    "gen_dlp_group",
    "gen_prime",
    "lagrange_fit",
    "LfsrParams",
    "seq_eval",
    "seq_pair",
    "PkcPrivateKey",
    "PkcPublicKey",
    "pkc_decrypt",
    "pkc_encrypt",
    "pkc_keygen",
    "NlrSpec",
    "Variant",
    "nlr_fit",
    "nlr_generate",
    "Bulletin",
    "CheatingDetected",
    "DealerParams",
    "DealerState",
    "ParticipantRecord",
    "ReconstructionError",
    "Share",
    "add_participant",
    "add_secret",
    "deal",
    "dealer_setup",
    "extract_subshadow",
    "participant_enroll",
    "privacy_sweep",
    "reconstruct_method1",
    "reconstruct_method2",
    "remove_participant",
    "remove_secret",
    "rethreshold",
    "update_secret",
    "verify_bulletin",
    "verify_participant",
    "verify_share",
    "audit_full",
    "audit_validity_only",
    "forge_deal",
]
