"""Activity level, energy expenditure, posture and ambient-comfort monitoring
from smartphone motion and environment sensors."""

from .activity import (
    LevelLedger,
    WindowFeatures,
    classify_level,
    compute_sma,
    extrapolate_ee,
    format_duration,
    ledger_update,
)
from .ambient import AmbientBand, AmbientVerdict, Violation, evaluate_ambient, track_episodes
from .golden import golden_check
from .ingest_io import load_config, load_profile, read_session, write_records
from .monitor import Alert, AlertKind, MonitorRules, SessionState, monitor_step, session_summary
from .pipeline import Engine, WindowResult, process_records
from .posture import classify_posture, fuse_step, tilt_from_gravity
from .preprocess import GravityState, high_pass, window_assemble
from .sensor_model import (
    ActivityLevel,
    Channel,
    EngineConfig,
    PostureClass,
    SensorRecord,
    validate_record,
)
from .synth import ActivityProfile, Bout, generate

__version__ = "0.1.0"
