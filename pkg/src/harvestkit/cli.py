"""
命令行介面

    harvestkit point    --config run.ini
    harvestkit map      --config run.ini --out map.csv --threads 8
    harvestkit optimize --config run.ini --seed 3
    harvestkit preset   rubidium
    harvestkit validate
    harvestkit freeze

退出碼: 0 成功，1 其他失敗 (如優化不可行)，2 配置/定義域錯誤，
3 積分不收斂，4 校驗失敗。
"""

import argparse
import configparser
import csv
import hashlib
import io
import json
import logging
import logging.config
import math
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from . import __version__
from .exceptions import (
    ConfigError,
    ConvergenceError,
    DomainError,
    HarvestKitError,
    ValidationError,
)
from .logging_config import configure_logging
from .models import (
    Branch,
    DimensionlessPoint,
    GridSpec,
    HarvestPoint,
    QuadratureSpec,
    Smearing,
    SweepResult,
)
from .settings import SCHEMA_VERSION, configure_settings, get_settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_VALIDATION = 4

FLOAT, INT, WORD = 'float', 'int', 'word'

# 段 -> 鍵 -> 類型
CONFIG_SCHEMA: Dict[str, Dict[str, str]] = {
    'medium': {
        'preset': WORD,
        'sound_speed': FLOAT,
        'healing_length': FLOAT,
        'dispersion_strength': FLOAT,
        'delta': FLOAT,
        'branch': WORD,
    },
    'detector': {
        'gap': FLOAT,
        'a': FLOAT,
        'pulse_width': FLOAT,
        'spot_size': FLOAT,
        's': FLOAT,
        'separation': FLOAT,
        'b': FLOAT,
        'coupling': FLOAT,
        'smearing': WORD,
    },
    'quadrature': {
        'rel_tol': FLOAT,
        'abs_tol': FLOAT,
        'max_subdivisions': INT,
        'u_max_factor': FLOAT,
        'default_panel': FLOAT,
        'u_max': FLOAT,
    },
    'grid': {
        'a_min': FLOAT,
        'a_max': FLOAT,
        'n_a': INT,
        'a_spacing': WORD,
        'b_min': FLOAT,
        'b_max': FLOAT,
        'n_b': INT,
        'b_spacing': WORD,
    },
    'optimize': {
        'a_min': FLOAT,
        'a_max': FLOAT,
        'b_min': FLOAT,
        'b_max': FLOAT,
        'constraint': WORD,
        'budget': INT,
    },
    'output': {
        'path': WORD,
    },
}

# 互斥的 SI / 無量綱寫法
ALTERNATIVES = [
    ('medium', 'healing_length', 'dispersion_strength'),
    ('medium', 'delta', 'healing_length'),
    ('medium', 'delta', 'dispersion_strength'),
    ('detector', 'gap', 'a'),
    ('detector', 'spot_size', 's'),
    ('detector', 'separation', 'b'),
]

MAP_COLUMNS = [
    'a', 'b', 'N_over_lambda2T2', 'concurrence', 'log10_concurrence',
    'I_min', 'causal_class', 'quad_error', 'status',
]


def _canonical(kind: str, raw: str, where: str) -> str:
    text = raw.strip()
    try:
        if kind == FLOAT:
            value = float(text)
            if not math.isfinite(value):
                raise ValueError('not finite')
            return repr(value)
        if kind == INT:
            return str(int(text))
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse {raw!r} ({exc})") from exc
    if kind == WORD and where != 'output.path':
        return text.lower()
    return text


@dataclass
class RunConfig:
    """
    運行配置

    由 INI 風格文件 ([medium] [detector] [quadrature] [grid] [optimize]
    [output]) 解析，值統一規範化，to_text() 與解析互為冪等。
    """

    values: Dict[str, Dict[str, str]] = field(default_factory=dict)

    @classmethod
    def from_text(cls, text: str) -> 'RunConfig':
        parser = configparser.ConfigParser(interpolation=None)
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        values = {}
        for section in parser.sections():
            schema = CONFIG_SCHEMA.get(section)
            if schema is None:
                raise ConfigError(f"unknown config section [{section}]")
            entries = {}
            for key, raw in parser.items(section):
                kind = schema.get(key)
                if kind is None:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
                entries[key] = _canonical(kind, raw, f"{section}.{key}")
            values[section] = entries
        config = cls(values)
        config.validate()
        return config

    @classmethod
    def from_file(cls, path: str) -> 'RunConfig':
        try:
            with open(path, encoding='utf-8') as handle:
                return cls.from_text(handle.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc

    def to_text(self) -> str:
        lines = []
        for section in CONFIG_SCHEMA:
            entries = self.values.get(section)
            if not entries:
                continue
            lines.append(f"[{section}]")
            for key in CONFIG_SCHEMA[section]:
                if key in entries:
                    lines.append(f"{key} = {entries[key]}")
            lines.append('')
        return '\n'.join(lines)

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode('utf-8')).hexdigest()

    def validate(self):
        for section, first, second in ALTERNATIVES:
            entries = self.values.get(section, {})
            if first in entries and second in entries:
                raise ConfigError(
                    f"[{section}] sets both {first} and {second}; give exactly one"
                )
        # 觸發所有派生值的檢查
        self.point()
        self.spec()

    def get(self, section: str, key: str, default: Any = None) -> Any:
        raw = self.values.get(section, {}).get(key)
        if raw is None:
            return default
        kind = CONFIG_SCHEMA[section][key]
        if kind == FLOAT:
            return float(raw)
        if kind == INT:
            return int(raw)
        return raw

    @property
    def preset(self) -> Optional[str]:
        return self.get('medium', 'preset')

    @property
    def coupling(self) -> float:
        return self.get('detector', 'coupling', 1.0)

    def _preset(self):
        if self.preset is None:
            return None
        from .medium import get_preset

        return get_preset(self.preset)[2]

    def medium(self):
        """MediumParams；只給無量綱參數時為 None"""
        from .medium import preset_medium
        from .models import MediumParams

        preset = self._preset()
        base = preset_medium(preset) if preset else None
        c = self.get('medium', 'sound_speed', base.sound_speed if base else None)
        if c is None:
            if any(k in self.values.get('medium', {})
                   for k in ('healing_length', 'dispersion_strength')):
                raise ConfigError("[medium] needs sound_speed for SI dispersion")
            return None
        xi = self.get('medium', 'healing_length')
        epsilon = self.get('medium', 'dispersion_strength')
        if xi is not None:
            epsilon = c * xi / math.sqrt(2.0)
        elif epsilon is None:
            epsilon = base.dispersion_strength if base else 0.0
        branch = self.get('medium', 'branch', base.branch.value if base else None)
        try:
            return MediumParams(
                sound_speed=c,
                dispersion_strength=epsilon,
                branch=Branch(branch or Branch.BOGOLIUBOV.value),
            )
        except (ValueError, DomainError) as exc:
            raise ConfigError(f"invalid [medium]: {exc}") from exc

    def point(self) -> DimensionlessPoint:
        """解析無量綱參數點；SI 量需要聲速與脈衝寬度"""
        preset = self._preset()
        medium = self.medium()
        T = self.get(
            'detector', 'pulse_width', preset.pulse_width if preset else None
        )
        if T is not None and T <= 0:
            raise ConfigError(f"pulse_width must be > 0, got {T}")

        def sound_length(what):
            if medium is None or T is None:
                raise ConfigError(
                    f"{what} in SI units needs sound_speed and pulse_width"
                )
            return medium.sound_speed * T

        a = self.get('detector', 'a')
        if a is None:
            gap = self.get('detector', 'gap')
            if gap is not None:
                if T is None:
                    raise ConfigError("gap in SI units needs pulse_width")
                a = gap * T
            else:
                a = 1.0

        s = self.get('detector', 's')
        if s is None:
            sigma = self.get(
                'detector', 'spot_size', preset.spot_size if preset else None
            )
            s = sigma / sound_length('spot_size') if sigma is not None else 0.125

        b = self.get('detector', 'b')
        if b is None:
            separation = self.get('detector', 'separation')
            if separation is not None:
                b = separation / sound_length('separation')
            else:
                b = 1.0

        delta = self.get('medium', 'delta')
        if delta is None:
            if medium is not None and medium.dispersion_strength > 0:
                delta = medium.dispersion_strength / (
                    medium.sound_speed * sound_length('dispersion')
                )
            else:
                delta = 0.0

        try:
            branch = medium.branch if medium else Branch(
                self.get('medium', 'branch', Branch.BOGOLIUBOV.value)
            )
            smearing = Smearing(self.get('detector', 'smearing', 'gaussian'))
        except ValueError as exc:
            raise ConfigError(f"invalid branch or smearing: {exc}") from exc
        try:
            return DimensionlessPoint(
                a=a, b=b, s=s, delta=delta, branch=branch, smearing=smearing
            )
        except DomainError as exc:
            raise ConfigError(exc.message) from exc

    def spec(self) -> QuadratureSpec:
        """[quadrature] 段覆蓋運行設置中的積分默認值"""
        defaults = QuadratureSpec.from_settings(get_settings())
        return QuadratureSpec(
            rel_tol=self.get('quadrature', 'rel_tol', defaults.rel_tol),
            abs_tol=self.get('quadrature', 'abs_tol', defaults.abs_tol),
            max_subdivisions=self.get(
                'quadrature', 'max_subdivisions', defaults.max_subdivisions
            ),
            u_max_factor=self.get('quadrature', 'u_max_factor', defaults.u_max_factor),
            default_panel=self.get(
                'quadrature', 'default_panel', defaults.default_panel
            ),
            u_max=self.get('quadrature', 'u_max'),
        )

    def grid(self) -> GridSpec:
        point = self.point()
        return GridSpec(
            a_range=(self.get('grid', 'a_min', 0.1), self.get('grid', 'a_max', 10.0)),
            n_a=self.get('grid', 'n_a', 60),
            b_range=(self.get('grid', 'b_min', 0.1), self.get('grid', 'b_max', 8.0)),
            n_b=self.get('grid', 'n_b', 60),
            s=point.s,
            delta=point.delta,
            branch=point.branch,
            smearing=point.smearing,
            spec=self.spec(),
            a_spacing=self.get('grid', 'a_spacing', 'log'),
            b_spacing=self.get('grid', 'b_spacing', 'linear'),
        )

    def optimize_options(self) -> Dict[str, Any]:
        return {
            'bounds': {
                'a': (self.get('optimize', 'a_min', 0.1),
                      self.get('optimize', 'a_max', 10.0)),
                'b': (self.get('optimize', 'b_min', 0.1),
                      self.get('optimize', 'b_max', 8.0)),
            },
            'constraint': self.get('optimize', 'constraint', 'none'),
            'budget': self.get('optimize', 'budget', 200),
        }


def load_config(args) -> RunConfig:
    if getattr(args, 'config', None):
        return RunConfig.from_file(args.config)
    return RunConfig()


def _clean(value):
    """JSON 不接受 NaN/Inf，替換為 null"""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def _provenance(config: RunConfig) -> Dict[str, Any]:
    from .fixtures import NORMALIZATION, fixture_hash

    return {
        'schema': SCHEMA_VERSION,
        'version': __version__,
        'fixture_hash': fixture_hash(),
        'normalization': NORMALIZATION,
        'config_sha256': config.digest(),
        'preset': config.preset,
    }


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, 'w', encoding='utf-8', newline='\n') as handle:
            handle.write(text)
        logger.info(f"結果已寫入 {out}")
    else:
        sys.stdout.write(text)


def harvest_json(result: HarvestPoint, config: RunConfig) -> str:
    payload = result.to_dict()
    payload['schema'] = SCHEMA_VERSION
    payload['provenance'] = _provenance(config)
    return json.dumps(_clean(payload), indent=2, sort_keys=True,
                      ensure_ascii=False) + '\n'


def _fmt(value) -> str:
    if value is None:
        return ''
    return format(float(value), '.17g')


def map_csv(result: SweepResult) -> str:
    """
    掃描結果 CSV：表頭在首行，行優先 (a 外層)，LF 換行，17 位有效數字；
    末行為 schema 註釋
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(MAP_COLUMNS)
    for harvest in result.points:
        writer.writerow([
            _fmt(harvest.point.a),
            _fmt(harvest.point.b),
            _fmt(harvest.negativity),
            _fmt(harvest.concurrence),
            _fmt(harvest.log_concurrence),
            _fmt(harvest.inseparability_min),
            harvest.causal_class,
            _fmt(harvest.diagnostics.get('quad_error')),
            harvest.status,
        ])
    buffer.write(
        f"# schema={SCHEMA_VERSION} fixtures={result.metadata.get('fixture_hash')}\n"
    )
    return buffer.getvalue()


def cmd_point(args, settings) -> int:
    from .entanglement import evaluate_point
    from .medium import fits_in_condensate, unreduce

    config = load_config(args)
    point = config.point()
    preset = config._preset()
    medium = config.medium()
    if preset is not None and medium is not None:
        fits_in_condensate(
            unreduce(point, medium, config.get(
                'detector', 'pulse_width', preset.pulse_width)),
            preset,
        )
    result = evaluate_point(point, config.spec(), config.coupling)
    _emit(harvest_json(result, config), args.out)
    return EXIT_OK


def cmd_map(args, settings) -> int:
    from .experiment import sweep

    config = load_config(args)
    result = sweep(
        config.grid(),
        threads=args.threads or settings['THREADS'],
        preset=config.preset,
        coupling=config.coupling,
    )
    _emit(map_csv(result), args.out)
    return EXIT_OK


def cmd_optimize(args, settings) -> int:
    from .experiment import optimize_negativity

    config = load_config(args)
    point = config.point()
    options = config.optimize_options()
    result = optimize_negativity(
        options['bounds'],
        constraint=options['constraint'],
        budget=options['budget'],
        seed=args.seed,
        s=point.s,
        delta=point.delta,
        branch=point.branch,
        smearing=point.smearing,
        spec=config.spec(),
    )
    _emit(harvest_json(result, config), args.out)
    return EXIT_OK


def cmd_preset(args, settings) -> int:
    from .medium import describe_preset, get_preset

    summary = describe_preset(get_preset(args.name)[2])
    summary['schema'] = SCHEMA_VERSION
    _emit(json.dumps(summary, indent=2, sort_keys=True) + '\n', args.out)
    return EXIT_OK


def cmd_validate(args, settings) -> int:
    from .validation import run_validation

    report = run_validation(settings['FIXTURES_DIR'])
    _emit(f"# schema={SCHEMA_VERSION}\n" + report.to_text() + '\n', args.out)
    if not report.passed:
        raise ValidationError(
            f"{len(report.failures)} validation check(s) failed",
            failures=[check.name for check in report.failures],
        )
    return EXIT_OK


def cmd_freeze(args, settings) -> int:
    from .fixtures import freeze_fixtures

    target = freeze_fixtures(args.out or settings['FIXTURES_DIR'])
    sys.stdout.write(f"{target}\n")
    return EXIT_OK


COMMANDS = {
    'point': cmd_point,
    'map': cmd_map,
    'optimize': cmd_optimize,
    'preset': cmd_preset,
    'validate': cmd_validate,
    'freeze': cmd_freeze,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', metavar='PATH', help='INI 配置文件')
    common.add_argument('--out', metavar='PATH', help='輸出文件 (默認標準輸出)')
    common.add_argument('--threads', type=int, metavar='N', help='掃描線程數')
    common.add_argument('--seed', type=int, default=0, metavar='N', help='優化種子')
    common.add_argument('--log-level', help='日誌級別 (DEBUG/INFO/WARNING)')
    common.add_argument('--json-logs', action='store_true', help='JSON 格式日誌')

    parser = argparse.ArgumentParser(
        prog='harvestkit',
        description='Entanglement harvesting in a dispersive (2+1)D phonon field',
    )
    parser.add_argument('--version', action='version', version=__version__)
    commands = parser.add_subparsers(dest='command', required=True)
    commands.add_parser('point', parents=[common], help='評估單個參數點')
    commands.add_parser('map', parents=[common], help='(a, b) 網格掃描，輸出 CSV')
    commands.add_parser('optimize', parents=[common], help='最大化負性')
    preset = commands.add_parser('preset', parents=[common], help='顯示物理預設')
    preset.add_argument('name', help='預設名稱，如 rubidium')
    commands.add_parser('validate', parents=[common], help='運行 oracle 校驗')
    commands.add_parser('freeze', parents=[common], help='計算並寫入回歸基準表')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        overrides = {}
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigError(f"--threads must be >= 1, got {args.threads}")
            overrides['THREADS'] = args.threads
        if args.log_level:
            overrides['LOG_LEVEL'] = args.log_level.upper()
        if args.json_logs:
            overrides['JSON_LOGS'] = True
        settings = configure_settings(overrides)
        logging.config.dictConfig(configure_logging(
            debug=settings['DEBUG'],
            level=settings['LOG_LEVEL'],
            log_dir=settings['LOG_DIR'],
            json_output=settings['JSON_LOGS'],
        ))
        return COMMANDS[args.command](args, settings)
    except (ConfigError, DomainError) as exc:
        logger.error(f"配置錯誤 [{exc.code}]: {exc.message}")
        return EXIT_CONFIG
    except ConvergenceError as exc:
        logger.error(f"積分不收斂 [{exc.code}]: {exc.message}")
        return EXIT_CONVERGENCE
    except ValidationError as exc:
        logger.error(f"校驗失敗 [{exc.code}]: {exc.message}")
        return EXIT_VALIDATION
    except HarvestKitError as exc:
        logger.error(f"運行失敗 [{exc.code}]: {exc.message}")
        return EXIT_FAILURE


if __name__ == '__main__':
    sys.exit(main())
