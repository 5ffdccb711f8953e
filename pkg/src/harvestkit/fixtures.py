"""
回歸基準表

以獨立 oracle (固定網格梯形、時域積分) 計算的參考值，存為純文本表：

    # harvestkit fixture table
    # schema: harvestkit/1
    # normalization: ...
    # provenance: <sha256>
    name  quantity  a  b  s  delta  branch  oracle  resolution  real  imag

provenance 為 (參數、oracle 名稱、解析度、歸一化約定) 的 SHA-256。
只有 `harvestkit freeze` 會寫入基準表。
"""

import csv
import hashlib
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from .exceptions import ValidationError
from .models import Branch, DimensionlessPoint, QuadratureSpec
from .response import radial_measure
from .settings import SCHEMA_VERSION, get_setting
from .specfun import (
    bessel_j0,
    double_time_integral_oracle,
    single_time_integral_oracle,
    trapezoid_radial_oracle,
)

logger = logging.getLogger(__name__)

TABLE_NAME = 'oracle_values.tsv'
UNFROZEN = 'unfrozen'

NORMALIZATION = (
    'measure=(u/2w)*F(su)^2/(2pi) for L, L_AB and M; '
    'units=lambda^2 T^2 with the residual 1/(cT) absorbed into lambda^2'
)

COLUMNS = [
    'name', 'quantity', 'a', 'b', 's', 'delta', 'branch',
    'oracle', 'resolution', 'real', 'imag',
]

# 銣預設的 δ = ε/(c²T)
RUBIDIUM_DELTA = 6.31e-8 / np.sqrt(2.0) / (8e-3 * 3e-3)

# g1 單時間梯形、g2 雙時間梯形 (Richardson) 的網格
SINGLE_TIME_POINTS = 4001
TIME_POINTS = 4000
# 徑向梯形 (Richardson，實際求值 2n-1 點)，每個節點上的 g2 用 RADIAL_TIME_POINTS
RADIAL_POINTS = 4001
RADIAL_TIME_POINTS = 2000
# 每批同時計算的徑向節點數
RADIAL_CHUNK = 128


@dataclass(frozen=True)
class FixturePoint:
    name: str
    quantity: str
    a: float
    b: float = 0.0
    s: float = 0.125
    delta: float = 0.0
    branch: str = 'bogoliubov'

    @property
    def oracle(self) -> str:
        if self.quantity == 'g1':
            return 'single_time_trapezoid'
        if self.quantity == 'g2':
            return 'double_time_trapezoid_richardson'
        return 'radial_trapezoid_richardson_time_domain'

    @property
    def resolution(self) -> str:
        if self.quantity == 'g1':
            return f'n={SINGLE_TIME_POINTS}'
        if self.quantity == 'g2':
            return f'n={TIME_POINTS}'
        return (
            f'n={RADIAL_POINTS};time_n={RADIAL_TIME_POINTS};'
            f'single_time_n={SINGLE_TIME_POINTS};u_max_factor=10'
        )

    def point(self) -> DimensionlessPoint:
        return DimensionlessPoint(
            a=self.a, b=self.b, s=self.s, delta=self.delta,
            branch=Branch(self.branch),
        )


@dataclass(frozen=True)
class FixtureRecord:
    entry: FixturePoint
    value: complex


# g1/g2 的 b 欄存放 w
FIXTURE_POINTS: List[FixturePoint] = [
    FixturePoint('g1_a1_w1', 'g1', a=1.0, b=1.0),
    FixturePoint('g2_a1_w1', 'g2', a=1.0, b=1.0),
    FixturePoint('g2_a0_w3', 'g2', a=0.0, b=3.0),
    FixturePoint('L_a1_s0125', 'L', a=1.0, b=0.0),
    FixturePoint('Lab_a1_b2', 'L_ab', a=1.0, b=2.0),
    FixturePoint('M_a1_b2', 'M', a=1.0, b=2.0),
    FixturePoint('M_a1_b0', 'M', a=1.0, b=0.0),
    FixturePoint(
        'N_rubidium_bogoliubov', 'negativity', a=1.0, b=1.0, delta=RUBIDIUM_DELTA,
    ),
    FixturePoint('N_rubidium_linear', 'negativity', a=1.0, b=1.0, branch='linear'),
]


def fixtures_dir(directory: Optional[str] = None) -> Path:
    return Path(directory or get_setting('FIXTURES_DIR'))


def _format(value: float) -> str:
    return format(float(value), '.17g')


def _identity_line(entry: FixturePoint) -> str:
    return '\t'.join([
        entry.name, entry.quantity, _format(entry.a), _format(entry.b),
        _format(entry.s), _format(entry.delta), entry.branch,
        entry.oracle, entry.resolution,
    ])


def provenance_hash(entries: List[FixturePoint]) -> str:
    """(參數, oracle, 解析度, 歸一化) 的 SHA-256"""
    digest = hashlib.sha256()
    digest.update(f'{SCHEMA_VERSION}\n{NORMALIZATION}\n'.encode('utf-8'))
    for entry in entries:
        digest.update((_identity_line(entry) + '\n').encode('utf-8'))
    return digest.hexdigest()


def time_domain_integrand(point: DimensionlessPoint):
    """
    L、L_AB、Re M、Im M 的暴力被積函數

    與 response.element_integrand 使用同一徑向測度，但 g1、g2 不用閉式：
    每個徑向節點上 g1 由單時間梯形、g2 由雙時間梯形 (Richardson) 直接
    計算，因此同時檢驗閉式時間積分與自適應徑向積分。
    """
    a, b = point.a, point.b

    def integrand(u):
        u = np.asarray(u, dtype=float)
        values = np.empty((4,) + u.shape)
        for start in range(0, u.size, RADIAL_CHUNK):
            chunk = slice(start, start + RADIAL_CHUNK)
            mu, w = radial_measure(point, u[chunk])
            g1_nodes = single_time_integral_oracle(a, w, n=SINGLE_TIME_POINTS)
            g2_nodes = double_time_integral_oracle(a, w, n=RADIAL_TIME_POINTS)
            local = mu * np.abs(g1_nodes) ** 2
            bessel = bessel_j0(b * u[chunk])
            nonlocal_ = -mu * bessel * g2_nodes
            values[:, chunk] = [
                local, local * bessel, nonlocal_.real, nonlocal_.imag
            ]
        return values

    return integrand


def oracle_value(entry: FixturePoint) -> complex:
    """用獨立 oracle 計算基準值"""
    if entry.quantity == 'g1':
        return single_time_integral_oracle(entry.a, entry.b, n=SINGLE_TIME_POINTS)
    if entry.quantity == 'g2':
        return double_time_integral_oracle(entry.a, entry.b, n=TIME_POINTS)

    point = entry.point()
    u_max = QuadratureSpec().cutoff(point.s)
    L, L_ab, M_re, M_im = trapezoid_radial_oracle(
        time_domain_integrand(point), u_max, n=RADIAL_POINTS, extrapolate=True
    )
    if entry.quantity == 'L':
        return complex(L, 0.0)
    if entry.quantity == 'L_ab':
        return complex(L_ab, 0.0)
    if entry.quantity == 'M':
        return complex(M_re, M_im)
    if entry.quantity == 'negativity':
        return complex(max(abs(complex(M_re, M_im)) - L, 0.0), 0.0)
    raise ValueError(f"unknown fixture quantity {entry.quantity!r}")


def freeze_fixtures(directory: Optional[str] = None) -> Path:
    """
    計算並寫入基準表

    返回:
        寫入的文件路徑
    """
    path = fixtures_dir(directory)
    path.mkdir(parents=True, exist_ok=True)
    target = path / TABLE_NAME
    provenance = provenance_hash(FIXTURE_POINTS)

    with open(target, 'w', encoding='utf-8', newline='') as handle:
        handle.write('# harvestkit fixture table\n')
        handle.write(f'# schema: {SCHEMA_VERSION}\n')
        handle.write(f'# normalization: {NORMALIZATION}\n')
        handle.write(f'# provenance: {provenance}\n')
        writer = csv.writer(handle, delimiter='\t', lineterminator='\n')
        writer.writerow(COLUMNS)
        for entry in FIXTURE_POINTS:
            value = oracle_value(entry)
            logger.info(f"基準值 {entry.name} = {value!r} ({entry.oracle})")
            writer.writerow(
                _identity_line(entry).split('\t')
                + [_format(value.real), _format(value.imag)]
            )

    logger.info(f"基準表已寫入 {target} (provenance={provenance[:12]})")
    return target


def _read_header(target: Path) -> Dict[str, str]:
    header = {}
    with open(target, encoding='utf-8') as handle:
        for line in handle:
            if not line.startswith('#'):
                break
            key, _, value = line[1:].partition(':')
            header[key.strip()] = value.strip()
    return header


def load_fixtures(directory: Optional[str] = None) -> Dict[str, FixtureRecord]:
    """
    讀取基準表

    返回:
        {name: FixtureRecord}；未凍結時為空字典

    異常:
        ValidationError: provenance 與當前定義不符
    """
    target = fixtures_dir(directory) / TABLE_NAME
    if not target.exists():
        logger.info(f"基準表不存在: {target}")
        return {}

    stored = _read_header(target).get('provenance')
    expected = provenance_hash(FIXTURE_POINTS)
    if stored != expected:
        raise ValidationError(
            f"fixture provenance mismatch in {target}: "
            f"stored {stored}, expected {expected}; run `harvestkit freeze`"
        )

    known = {entry.name: entry for entry in FIXTURE_POINTS}
    records = {}
    with open(target, encoding='utf-8', newline='') as handle:
        rows = (line for line in handle if not line.startswith('#'))
        for row in csv.DictReader(rows, delimiter='\t'):
            entry = known.get(row['name'])
            if entry is None:
                continue
            records[entry.name] = FixtureRecord(
                entry=entry,
                value=complex(float(row['real']), float(row['imag'])),
            )
    return records


def fixture_hash(directory: Optional[str] = None) -> str:
    """已凍結基準表的 provenance；未凍結時為 'unfrozen'"""
    target = fixtures_dir(directory) / TABLE_NAME
    if not target.exists():
        return UNFROZEN
    return _read_header(target).get('provenance', UNFROZEN)
