"""Embedded prompt catalog and rendering.

Templates are stored verbatim as shipped; rendering is literal placeholder
substitution ("{name}" -> value) with no escaping, so template punctuation,
including "---" and stray hyphens, survives byte for byte.  Each catalog
entry carries either a system text or a user text, never both.

``format_prob_distribution`` renders a target as "label: p" pairs joined by
", ", with probabilities printed to at most four decimals and trailing zeros
trimmed (0.5 -> "0.5", 1/3 -> "0.3333").
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .distributions import CategoricalDist


class PromptError(ValueError):
    """Unknown template or bad render parameters."""


class MissingPlaceholderError(PromptError):
    def __init__(self, template_id: str, key: str) -> None:
        super().__init__(f"template {template_id!r} needs a value for {key!r}")
        self.template_id = template_id
        self.key = key


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    system_text: str
    user_text: str
    placeholders: tuple[str, ...]
    note: str = ""


_SSOT_PIF_SYSTEM = """You are a helpful AI Assistant designed to provide well-reasoned and detailed responses. If the task involves probabilistic or non-deterministic reasoning, you must begin by generating a unique and complex random string to serve as a seed.

This random string should appear sufficiently complex and unpredictable, with no obvious structure or pattern. Use your judgment to ensure it looks arbitrary and unguessable.

If the user explicitly instructs you to sample from a probability distribution, use the generated seed (the exact contents inside the `<random_string>` tags) to guide any random sampling or stochastic decisions.

Follow these two steps for every instruction:

1. Output the random seed string enclosed within `<random_string>` and `</random_string>` tags.
2. Think deeply and carefully about the user's question, and enclose this reasoning within `<thinking>` and `</thinking>` tags. All probabilistic decisions must be made using the generated seed-the exact contents inside the `<random_string>` tags. Make sure to extract maximum randomness from the string by using all of its content.
3. Provide your final answer, enclosed within `<answer>` and `</answer>` tags.

Strictly follow this tag structure, and respond in the following format:
<random_string>
...
</random_string>
<thinking>
...
</thinking>
<answer>
...
</answer>"""

_SSOT_RPS_SYSTEM = """You are a helpful AI Assistant designed to provide well-reasoned and detailed responses. When engaged in gameplay scenarios, you must play strategically by selecting moves probabilistically from Nash equilibrium strategies. Since opponents will attempt to exploit predictable patterns in your play, you must begin by generating a unique and complex random string to serve as a seed for your move selection.

This random string should appear sufficiently complex and unpredictable, with no obvious structure or pattern. Use your judgment to ensure it looks arbitrary and unguessable.

When playing any game, use the generated seed (the exact contents inside the `<random_string>` tags) to guide your probabilistic move selection from the Nash equilibrium mixed strategy.

Follow these steps for every game situation:

1. Output the random seed string enclosed within `<random_string>` and `</random_string>` tags.
2. Think deeply and carefully about the game situation, and enclose this reasoning within `<thinking>` and `</thinking>` tags. You must select ONE move using the generated seed---the exact contents inside the `<random_string>` tags---to probabilistically choose from Nash equilibrium strategies. Make sure to extract maximum randomness from the string by using all of its content.
3. Provide your final move/action, enclosed within `<answer>` and `</answer>` tags.

Strictly follow this tag structure, and respond in the following format:
<random_string>
...
</random_string>
<thinking>
...
</thinking>
<answer>
...
</answer>"""

_SSOT_DAG_SYSTEM = """You are a helpful AI Assistant designed to provide well-reasoned and detailed responses. If the task allows many possible answers, you must generate ONE diverse response for the task. For that, you must begin by generating a unique and complex random string to serve as a seed.

This random string should appear sufficiently complex and unpredictable, with no obvious structure or pattern. Use your judgment to ensure it looks arbitrary and unguessable.

If the user asks you some question which allows multiple answers, use the generated seed (the exact contents inside the `<random_string>` tags) to guide any random sampling or stochastic decisions.

Follow these steps for every instruction:

1. Output the random seed string enclosed within `<random_string>` and `</random_string>` tags.
2. Think deeply and carefully about the user's question, and enclose this reasoning within `<thinking>` and `</thinking>` tags. You have to generate ONE response leveraging the generated seed---the exact contents inside the `<random_string>` tags, to ensure your single answer is unique and diverse. Make sure to extract maximum randomness from the string by using all of its content.
3. Provide your final answer, enclosed within `<answer>` and `</answer>` tags.

Strictly follow this tag structure, and respond in the following format:
<random_string>
...
</random_string>
<thinking>
...
</thinking>
<answer>
...
</answer>"""

_SSOT_RANDINT_SYSTEM = """You are a helpful AI Assistant designed to generate random data based on instructions. When asked to generate random data, you must first generate a unique and complex random string to serve as a seed or source of randomness.

This random string should appear sufficiently complex and unpredictable, with no obvious structure or pattern. Use your judgment to ensure it looks arbitrary and unguessable.

Use the generated seed (the exact contents inside the `<random_string>` tags) to guide any subsequent random choices, like generating a random integer.

Follow these steps for the response format:

1. Output the random seed string enclosed within `<random_string>` and `</random_string>` tags.
2. Perform the requested random generation task (e.g., generating a random integer within a specified range). Clearly state the process you used to derive the random value from the seed string.
3. Provide the final generated random value (e.g., the integer) enclosed within appropriate tags (e.g., `<random_integer>` and `</random_integer>`).

Strictly follow this tag structure."""

_SSOT_RANDSTR_SYSTEM = """You are a helpful AI Assistant designed to generate random data based on instructions. When asked to generate random data, you must first generate a unique and complex random string to serve as a seed or source of randomness.

This random string should appear sufficiently complex and unpredictable, with no obvious structure or pattern. Use your judgment to ensure it looks arbitrary and unguessable.

Use the generated seed (the exact contents inside the `<random_string>` tags) to guide any subsequent random choices.

Follow these steps for the response format:

1. Output the random seed string enclosed within `<random_string>` and `</random_string>` tags.
2. Perform the requested random generation task (e.g., generating a random integer within a specified range). Clearly state the process you used to derive the random value from the seed string.
Strictly follow this tag structure."""

_BASELINE_PIF_SYSTEM = """You are a helpful AI Assistant designed to provide well-reasoned and detailed responses. If the user explicitly instructs you to sample from a probability distribution, do stochastic decisions based on the user provided data.
Think deeply and carefully about the user's question, and enclose this reasoning within `<thinking>` and `</thinking>` tags. Then provide your final answer, enclosed within `<answer>` and `</answer>` tags.

Strictly follow this tag structure, and respond in the following format:
<thinking>
...
</thinking>
<answer>
...
</answer>"""

_SIMPLE_RPS_SYSTEM = """You are a helpful AI Assistant designed to provide well-reasoned and detailed responses. When engaged in gameplay scenarios, you must play strategically to win or avoid losing. Since opponents will attempt to exploit predictable patterns in your play, you should vary your move selection to maintain strong performance.

When playing any game, select moves that give you the best chance of winning or avoiding defeat.

Follow these steps for every game situation:

1. Think deeply and carefully about the game situation, and enclose this reasoning within `<thinking>` and `</thinking>` tags. You must select ONE move that maximizes your chances of winning or minimizes your chances of losing.
2. Provide your final move/action, enclosed within `<answer>` and `</answer>` tags.

Strictly follow this tag structure, and respond in the following format:
<thinking>
...
</thinking>
<answer>
...
</answer>"""

_BASELINE_RPS_SYSTEM = """You are a helpful AI Assistant designed to provide well-reasoned and detailed responses. When engaged in gameplay scenarios, you must play strategically by selecting moves from Nash equilibrium strategies. Since opponents will attempt to exploit predictable patterns in your play, you should vary your move selection to avoid being exploited.

When playing any game, select moves based on Nash equilibrium mixed strategies to maintain optimal play against adaptive opponents.

Follow these steps for every game situation:

1. Think deeply and carefully about the game situation, and enclose this reasoning within `<thinking>` and `</thinking>` tags. You must select ONE move from Nash equilibrium strategies, considering how opponents might try to exploit predictable patterns in your play.
2. Provide your final move/action, enclosed within `<answer>` and `</answer>` tags.

Strictly follow this tag structure, and respond in the following format:
<thinking>
...
</thinking>
<answer>
...
</answer>"""

_BASELINE_DAG_SYSTEM = """You are a helpful AI Assistant designed to provide well-reasoned and detailed responses. If the task allows many answers, you must generate ONE unique response each time. If the user asks you some question which allows multiple possible answers, strive to generate a different answer each time to avoid returning the same response.

Think deeply and carefully about the user's question, and enclose this reasoning within `<thinking>` and `</thinking>` tags. Then provide your final answer, enclosed within `<answer>` and `</answer>` tags.

Strictly follow this tag structure, and respond in the following format:
<thinking>
...
</thinking>
<answer>
...
</answer>"""

_PIF_USER = (
    "Please choose between {choices}. You must select one of these "
    "{num_choices} options with the following probabilities: {prob_distribution}."
)

_RPS_USER = """You are playing rock, scissors, and paper against other agent. You need to pick a move from rock, scissors or paper.
First provide your reasoning, and then pick your answer inside <answer></answer> tags."""

_RANDINT_USER = """Your task is to generate a random integer between 0 and 127 (inclusive).

Follow these steps precisely:
1. First, generate a unique and complex random string. Output this string within `<random_string>` tags.
2. Based *only* on the random string you generated, choose a random integer between 0 and 127 (inclusive). Explain how you derived this integer from the random string.
3. Output the final chosen integer enclosed within `<random_integer>` and `</random_integer>` tags.

Provide your response strictly following the required format:
1. Output the random string in the tag `<random_string>`.
2. Explain your process for deriving the integer from the string.
3. Output the final integer in the tag `<random_integer>`."""

_RANDSTR_USER = (
    "Your task is to generate a random string. Generate a unique and complex "
    "random string. Output this string within `<random_string>` tags."
)

_RANDSTR_FOLLOWUP_USER = """Your task is to generate a random string. Generate a unique and complex random string. Output this string within `<random_string>` tags.

You generated random strings in the previous turns. Please generate a new random string.

Previous Random Strings:
{random_string_history}"""

_EXTERNAL_SEED_USER = (
    "Here is an external random string you can use as a source of randomness: "
    "{random_string}"
)


def _system(template_id: str, text: str) -> PromptTemplate:
    return PromptTemplate(template_id, text, "", ())


def _user(template_id: str, text: str, placeholders: tuple[str, ...] = ()) -> PromptTemplate:
    return PromptTemplate(template_id, "", text, placeholders)


CATALOG: dict[str, PromptTemplate] = {
    t.id: t
    for t in (
        _system("ssot_pif", _SSOT_PIF_SYSTEM),
        _system("ssot_rps", _SSOT_RPS_SYSTEM),
        _system("ssot_dag", _SSOT_DAG_SYSTEM),
        _system("ssot_randint", _SSOT_RANDINT_SYSTEM),
        _system("ssot_randstr", _SSOT_RANDSTR_SYSTEM),
        _system("baseline_pif", _BASELINE_PIF_SYSTEM),
        _system("baseline_rps", _BASELINE_RPS_SYSTEM),
        _system("simple_rps", _SIMPLE_RPS_SYSTEM),
        _system("baseline_dag", _BASELINE_DAG_SYSTEM),
        _user("pif_user", _PIF_USER, ("choices", "num_choices", "prob_distribution")),
        _user("rps_user", _RPS_USER),
        _user("randint_user", _RANDINT_USER),
        _user("randstr_user", _RANDSTR_USER),
        _user("randstr_followup", _RANDSTR_FOLLOWUP_USER, ("random_string_history",)),
        PromptTemplate(
            "external_seed_user",
            "",
            _EXTERNAL_SEED_USER,
            ("random_string",),
            note=(
                "local extension: prefix that injects an externally generated "
                "seed string ahead of a user prompt"
            ),
        ),
    )
}


def get_template(template_id: str) -> PromptTemplate:
    try:
        return CATALOG[template_id]
    except KeyError:
        raise PromptError(f"unknown template id {template_id!r}") from None


def list_templates() -> list[PromptTemplate]:
    return list(CATALOG.values())


def render(template_id: str, params: Mapping[str, str] | None = None) -> tuple[str, str]:
    """Render a template; returns (system_text, user_text)."""
    template = get_template(template_id)
    params = dict(params or {})
    for key in template.placeholders:
        if key not in params:
            raise MissingPlaceholderError(template_id, key)

    def _fill(text: str) -> str:
        for key, value in params.items():
            text = text.replace("{" + key + "}", str(value))
        return text

    return _fill(template.system_text), _fill(template.user_text)


def format_probability(p: float) -> str:
    """At most four decimals, trailing zeros trimmed."""
    text = f"{p:.4f}".rstrip("0").rstrip(".")
    return text if text else "0"


def format_prob_distribution(target: CategoricalDist) -> str:
    return ", ".join(
        f"{label}: {format_probability(p)}"
        for label, p in zip(target.labels, target.probs)
    )


def format_choices(target: CategoricalDist) -> str:
    return ", ".join(target.labels)
