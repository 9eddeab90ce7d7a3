"""JSON game configuration and trajectory CSV input."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from .cost import cost_from_spec, cost_to_spec
from .game import CapabilityProfile, DesignerPrefs, GameInstance, RewardScheme, project_capability
from .score import ScoreModel, ScoreParams


class ConfigError(ValueError):
    """Invalid configuration; the message lists ``location: problem`` lines."""


@lru_cache(maxsize=2)
def _schema(extra: str):
    cfg = ConfigDict(extra=extra)

    class ScoreSpec(BaseModel):
        model_config = cfg
        alpha: float
        beta: float
        lower: float = 0.0
        upper: float = 1.0

    class PlayerSpec(BaseModel):
        model_config = cfg
        id: str
        theta: Optional[float] = None
        theta_vector: Optional[list[float]] = None
        score: ScoreSpec

        @model_validator(mode="after")
        def _one_capability(self):
            if (self.theta is None) == (self.theta_vector is None):
                raise ValueError("give exactly one of theta or theta_vector")
            return self

    class CostSpec(BaseModel):
        model_config = cfg
        family: Literal["linear", "power", "piecewise"]
        params: dict[str, Union[float, list[float]]]

    class RewardSpec(BaseModel):
        model_config = cfg
        scheme: Literal["winner_take_all", "top_k", "decay", "explicit"]
        params: dict[str, Union[float, list[float]]]

    class DesignerSpec(BaseModel):
        model_config = cfg
        ranking_reward: float
        tbt_cost: CostSpec

    class GameSpec(BaseModel):
        model_config = cfg
        players: list[PlayerSpec]
        capability_weights: Optional[list[float]] = None
        cost: CostSpec
        rewards: RewardSpec
        tbt: float = 0.0
        tie_tol: float = 0.0
        designer: Optional[DesignerSpec] = None

    return GameSpec


@dataclass(frozen=True)
class GameConfig:
    game: GameInstance
    player_ids: tuple
    reward_spec: dict
    designer: Optional[DesignerPrefs] = None

    def to_dict(self) -> dict:
        caps = self.game.capabilities
        players = []
        for i, pid in enumerate(self.player_ids):
            p = self.game.scores.curves[i]
            entry = {"id": pid}
            if caps.vectors is not None:
                entry["theta_vector"] = list(caps.vectors[i])
            else:
                entry["theta"] = caps.thetas[i]
            entry["score"] = {"alpha": p.alpha, "beta": p.beta, "lower": p.lower, "upper": p.upper}
            players.append(entry)
        out = {"players": players}
        if caps.weights is not None:
            out["capability_weights"] = list(caps.weights)
        out["cost"] = cost_to_spec(self.game.cost)
        out["rewards"] = self.reward_spec
        out["tbt"] = self.game.tbt
        if self.game.tie_tol:
            out["tie_tol"] = self.game.tie_tol
        if self.designer is not None:
            out["designer"] = {
                "ranking_reward": self.designer.ranking_reward,
                "tbt_cost": cost_to_spec(self.designer.tbt_cost),
            }
        return out


def _format_validation(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        loc = ".".join(str(x) for x in e["loc"]) or "<root>"
        lines.append(f"{loc}: {e['msg']}")
    return "\n".join(lines)


def _build_cost(spec, where):
    try:
        return cost_from_spec(spec.family, **spec.params)
    except (TypeError, KeyError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _build_rewards(spec, n):
    p = spec.params
    try:
        if spec.scheme == "winner_take_all":
            return RewardScheme.winner_take_all(n, p["reward"])
        if spec.scheme == "top_k":
            k = p["k"]
            if k != int(k):
                raise ValueError("k must be an integer")
            return RewardScheme.top_k(n, int(k), p["reward"])
        if spec.scheme == "decay":
            return RewardScheme.decay(n, p["reward"], p["ratio"])
        values = p["values"]
        if not isinstance(values, list) or len(values) != n:
            raise ValueError(f"values must list {n} rewards")
        return RewardScheme(tuple(values))
    except KeyError as exc:
        raise ConfigError(f"rewards.params: missing {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"rewards.params: {exc}") from None


def parse_config(data: dict, lenient: bool = False) -> GameConfig:
    try:
        spec = _schema("ignore" if lenient else "forbid").model_validate(data)
    except ValidationError as exc:
        raise ConfigError(_format_validation(exc)) from None

    n = len(spec.players)
    if n < 2:
        raise ConfigError("players: need at least two players")
    ids = [p.id for p in spec.players]
    if len(set(ids)) != n:
        raise ConfigError("players: ids must be unique")
    vec_mode = spec.players[0].theta_vector is not None
    if any((p.theta_vector is not None) != vec_mode for p in spec.players):
        raise ConfigError("players: mix of theta and theta_vector")
    if vec_mode and spec.capability_weights is None:
        raise ConfigError("capability_weights: required when players give theta_vector")

    if vec_mode:
        thetas = []
        for i, p in enumerate(spec.players):
            try:
                thetas.append(project_capability(spec.capability_weights, p.theta_vector))
            except ValueError as exc:
                raise ConfigError(f"players.{i}.theta_vector: {exc}") from None
    else:
        thetas = [p.theta for p in spec.players]

    order = sorted(range(n), key=lambda i: -thetas[i])
    params = []
    for i in order:
        s = spec.players[i].score
        try:
            params.append(ScoreParams(s.alpha, s.beta, s.lower, s.upper))
        except ValueError as exc:
            raise ConfigError(f"players.{i}.score: {exc}") from None
    try:
        if vec_mode:
            caps = CapabilityProfile.from_vectors(
                spec.capability_weights, [spec.players[i].theta_vector for i in order]
            )
        else:
            caps = CapabilityProfile(tuple(thetas[i] for i in order))
    except ValueError as exc:
        raise ConfigError(f"players: {exc}") from None

    cost = _build_cost(spec.cost, "cost")
    rewards = _build_rewards(spec.rewards, n)
    try:
        game = GameInstance(caps, ScoreModel(tuple(params)), cost, rewards, spec.tbt, spec.tie_tol)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    designer = None
    if spec.designer is not None:
        try:
            designer = DesignerPrefs(
                spec.designer.ranking_reward,
                _build_cost(spec.designer.tbt_cost, "designer.tbt_cost"),
            )
        except ValueError as exc:
            raise ConfigError(f"designer: {exc}") from None
    return GameConfig(
        game,
        tuple(ids[i] for i in order),
        spec.rewards.model_dump(),
        designer,
    )


def load_config(path, lenient: bool = False) -> GameConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError("<root>: expected a JSON object")
    return parse_config(data, lenient)


# --- trajectory CSV ---------------------------------------------------------

CSV_HEADER = ["model_id", "steps", "score"]


def read_trajectories(path) -> dict:
    """Read ``model_id,steps,score`` rows into ``{model_id: (steps, scores)}``.

    Models keep their order of first appearance.  Raises DataError (from
    :mod:`rankgame.fitting`) naming the offending line numbers.
    """
    from .fitting import DataError

    text = Path(path).read_text(encoding="utf-8")
    lines = [(k + 1, line) for k, line in enumerate(text.splitlines())]
    lines = [(k, line) for k, line in lines if line.strip() and not line.lstrip().startswith("#")]
    if not lines:
        raise DataError("no rows")
    header_no, header = lines[0]
    if [h.strip() for h in next(csv.reader([header]))] != CSV_HEADER:
        raise DataError(f"line {header_no}: header must be {','.join(CSV_HEADER)}")
    if len(lines) == 1:
        raise DataError("no rows")
    samples: dict = {}
    bad = []
    for lineno, line in lines[1:]:
        fields = next(csv.reader(io.StringIO(line)))
        if len(fields) != 3:
            bad.append((lineno, "expected 3 fields"))
            continue
        mid, steps, score = (f.strip() for f in fields)
        try:
            e, v = float(steps), float(score)
        except ValueError:
            bad.append((lineno, "steps and score must be numbers"))
            continue
        if not mid:
            bad.append((lineno, "empty model_id"))
        elif not (math.isfinite(e) and e >= 0):
            bad.append((lineno, f"steps {steps} must be a nonnegative number"))
        elif not (math.isfinite(v) and 0 <= v <= 1):
            bad.append((lineno, f"score {score} outside [0, 1]"))
        else:
            es, vs = samples.setdefault(mid, ([], []))
            es.append(e)
            vs.append(v)
    if bad:
        msg = "; ".join(f"line {k}: {why}" for k, why in bad)
        raise DataError(msg, [k for k, _ in bad])
    return samples
