"""OpenAI-compatible chat backend over HTTP.

One POST per completion, with two bounded retries on transport errors. Never
used by the offline test suite; the gateway wires it only when the service
config names a network backend for a role.
"""

from __future__ import annotations

import httpx

from ..errors import ProviderUnavailable
from .base import Backend, Completion, CompletionRequest

TRANSPORT_RETRIES = 2


class HttpBackend(Backend):
    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: str = "",
        timeout_s: float = 60.0,
        client: httpx.Client | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key
        self._client = client or httpx.Client(timeout=timeout_s)

    def complete(self, req: CompletionRequest) -> Completion:
        body = {
            "model": self.model,
            "temperature": req.params.temperature,
            "messages": [{"role": r, "content": c} for r, c in req.messages],
        }
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"

        last_err: Exception | None = None
        for _ in range(1 + TRANSPORT_RETRIES):
            try:
                resp = self._client.post(
                    f"{self.base_url}/chat/completions", json=body, headers=headers
                )
                resp.raise_for_status()
                data = resp.json()
                text = data["choices"][0]["message"]["content"]
                return Completion(text=text, usage=data.get("usage", {}))
            except (httpx.TransportError, httpx.HTTPStatusError) as err:
                last_err = err
        raise ProviderUnavailable(f"backend {self.base_url} failed: {last_err}")
