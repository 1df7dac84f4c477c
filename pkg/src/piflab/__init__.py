"""Seeded randomness extraction and probabilistic instruction following.

The package has three layers:

* deterministic plumbing: counter-based hashing (:mod:`piflab.prng`),
  categorical distributions and divergences (:mod:`piflab.distributions`),
  string-to-bucket extractors (:mod:`piflab.extractors`), and sequence
  complexity measures (:mod:`piflab.complexity`);
* the theory side: band-bounded and independent source models
  (:mod:`piflab.sources`), closed-form deviation bounds
  (:mod:`piflab.bounds`), and Monte-Carlo verification
  (:mod:`piflab.verify`);
* the experiment side: prompt catalog (:mod:`piflab.prompts`), answer
  parsing (:mod:`piflab.parsing`), chat backends (:mod:`piflab.client`),
  the sampling-experiment runner (:mod:`piflab.runner`), and the
  rock-paper-scissors arena (:mod:`piflab.arena`).
"""

from .arena import (
    MOVES,
    Agent,
    AlwaysAgent,
    ArenaError,
    Bot,
    ExtractorAgent,
    FrequencyExploiter,
    GameRecord,
    LlmAgent,
    MarkovPredictor,
    MatchResult,
    RandomBot,
    UniformAgent,
    make_agent,
    make_bot,
    outcome,
    play_match,
    series_summary,
)
from .bounds import (
    BoundError,
    BoundReport,
    UnsupportedSizeError,
    balanced_subset_mass,
    collision_base,
    dft_magnitudes,
    divisors,
    euler_phi,
    finite_sample_term,
    min_entropy,
    pushforward_mod,
    renyi_entropy,
    sum_mod_bound,
    sum_mod_bound_general,
    sv_hash_bound,
    weissman_phi,
)
from .client import (
    BackendError,
    ChatRequest,
    ChatResponse,
    HttpBackend,
    HttpStatusError,
    MalformedResponseError,
    MockBackend,
    RateLimiter,
    RateLimitError,
    RetryPolicy,
    TransportError,
    complete,
)
from .complexity import (
    ComplexityError,
    ComplexityReport,
    analyze,
    compression_ratio,
    lz76_phrase_count,
    normalized_lz,
)
from .config import Config, ConfigError, load_config, merge_config
from .distributions import (
    CategoricalDist,
    DistributionError,
    EmpiricalDist,
    LabelMismatchError,
    UnknownActionError,
    effect_size_w,
    empirical_from_actions,
    js_divergence,
    kl_divergence,
    summarize,
    tv_distance,
)
from .extractors import (
    AffineHash,
    CdfThreshold,
    ExtractorError,
    MapperError,
    ModBucket,
    RollingHash,
    SumMod,
    affine_hash,
    cdf_blocks,
    extract_action,
    extract_value,
    extractor_from_dict,
    extractor_to_dict,
    is_prime,
    map_uniform_to_target,
    mapper_from_dict,
    mapper_to_dict,
    rolling_hash,
    sample_affine_params,
    string_value_mod,
    sum_mod,
)
from .parsing import (
    AmbiguousMatchError,
    MissingTagError,
    NoMatchError,
    ParseError,
    normalize_answer,
    parse_pif_answer,
    parse_tagged,
)
from .prng import CounterRng, chain64, finalize64, hash64, spawn_keys, uniform01, word_at
from .prompts import (
    MissingPlaceholderError,
    PromptError,
    PromptTemplate,
    format_choices,
    format_prob_distribution,
    format_probability,
    get_template,
    list_templates,
    render,
)
from .runner import (
    ExcessiveFailureError,
    PifExperimentSpec,
    RepetitionResult,
    RunnerError,
    RunReport,
    TrialRecord,
    build_request,
    load_trials,
    persist_trials,
    render_report,
    run_pif,
    score_trials,
)
from .sources import (
    IndepSourceSpec,
    SourceError,
    SvSourceSpec,
    embed_mod,
    exact_sum_mod_distribution,
    sample_indep_batch,
    sample_indep_string,
    sample_sv_batch,
    sample_sv_string,
    source_from_dict,
    sum_law_as_dist,
    sv_conditional,
    sv_renyi_entropy_bounds,
)
from .verify import VerificationReport, verify_sum_mod_bound, verify_sv_hash_bound

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
