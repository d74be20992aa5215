"""Environment variable names shared by the CLI and the HTTP service."""

ENV_CHECKPOINT = "ARTIGEN_CHECKPOINT"
ENV_LIBRARY = "ARTIGEN_LIBRARY"
ENV_VLM_ENDPOINT = "ARTIGEN_VLM_ENDPOINT"
ENV_VLM_MODEL = "ARTIGEN_VLM_MODEL"
ENV_HOME = "ARTIC_HOME"
