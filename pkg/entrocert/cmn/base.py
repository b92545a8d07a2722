from __future__ import annotations

from pydantic import BaseModel, ConfigDict


class Base(BaseModel):
    model_config = ConfigDict(
        arbitrary_types_allowed=True,
        ser_json_inf_nan="constants",
    )
