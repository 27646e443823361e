from typing import Literal
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

class Settings(BaseSettings):
    """
    Centralized application settings management using Pydantic.
    Settings are loaded from environment variables or a .env file.
    """

    # --- Core Application Settings ---
    APP_NAME: str = Field("tempoflow", description="The name of the application.")
    APP_VERSION: str = Field("0.1.0", description="The version of the application.")
    ENVIRONMENT: str = Field("development", description="The deployment environment (e.g., 'development', 'production').")
    LOG_LEVEL: str = Field("INFO", description="Logging level for the application.")

    # --- Ingestion ---
    INPUT_FORMAT: Literal["tsv", "csv"] = Field("tsv", description="Default format of interaction record files.")

    # --- Flow Computation ---
    STRICT_PRUNE: bool = Field(False, description="Preprocessing also prunes interactions with t == mintime.")
    LP_MAX_VARIABLES: int = Field(200, description="Largest LP the rational simplex oracle is contracted for.")
    LP_ITERATION_CAP: int = Field(20000, description="Maximum number of simplex pivots before giving up.")

    # --- Pattern Search ---
    PATH_TABLE_ROW_CAP: int = Field(1_000_000, description="Row count above which path precomputation warns about table size.")
    PATTERN_LIMIT: int = Field(0, description="Stop pattern enumeration after this many instances (0 = unlimited).")

    # --- Subgraph Extraction ---
    EXTRACT_MAX_HOPS: int = Field(4, description="Upper bound accepted for --hops during cycle extraction.")
    EXTRACT_MIN_INTERACTIONS: int = Field(1, description="Discard extracted subgraphs with fewer interactions.")
    EXTRACT_MAX_INTERACTIONS: int = Field(10_000, description="Discard extracted subgraphs with more interactions.")

    # --- Benchmark ---
    BENCH_JOBS: int = Field(1, description="Worker processes used by the benchmark harness.")
    BENCH_REPETITIONS: int = Field(1, description="Timed repetitions per method and instance.")
    BENCH_SEED: int = Field(42, description="Default seed for synthetic benchmark instances.")

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding='utf-8',
        extra="ignore"
    )

# Create a single, importable instance of the settings
settings = Settings()

# --- Environment-specific Overrides ---
if settings.ENVIRONMENT == "production":
    settings.LOG_LEVEL = "WARNING"
if not 2 <= settings.EXTRACT_MAX_HOPS <= 4:
    raise ValueError("EXTRACT_MAX_HOPS must lie in [2, 4]; cycle enumeration above 4 hops is not supported.")
