import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

WELL_FORMED_COMPLETION = """ Island Couscous
Ingredients:
- 1 cup couscous
- 2 tsp allspice
- 1 scotch bonnet pepper
Instructions:
1. Boil the water with allspice.
2. Add couscous and the pepper, then rest five minutes.
"""

MALFORMED_COMPLETION = "Sorry, here is a poem about couscous instead."

#: prompts containing this marker get a malformed completion
MALFORMED_MARKER = "surprising"


class _CompletionHandler(BaseHTTPRequestHandler):
    def do_POST(self):
        if self.path != "/v1/completions":
            self.send_error(404)
            return
        length = int(self.headers.get("Content-Length", "0"))
        payload = json.loads(self.rfile.read(length))
        self.server.requests.append(payload)
        text = (MALFORMED_COMPLETION
                if MALFORMED_MARKER in payload.get("prompt", "")
                else WELL_FORMED_COMPLETION)
        body = json.dumps({
            "id": "cmpl-test", "object": "text_completion",
            "model": payload.get("model", ""),
            "choices": [{"text": text, "index": 0, "finish_reason": "stop"}],
        }).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):  # keep pytest output clean
        pass


@pytest.fixture
def mock_endpoint():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _CompletionHandler)
    server.requests = []
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{server.server_port}", server
    finally:
        server.shutdown()
        server.server_close()


KEYWORDS = ["", "novel", "unique", "new", "different", "surprising",
            "creative, desirable and useful", "original", "authentic",
            "traditional", "prototypical"]
TEMPLATES = ["Basic", "Persona", "Blend", "Definition"]


def make_prompt_file(path, dish_id="d1", dish_name="Couscous", country="JM"):
    """44 prompts (11 keyword slots x 4 templates) in the documented format."""
    lines = []
    for template in TEMPLATES:
        for slot, keyword in enumerate(KEYWORDS):
            kw = f"{keyword} " if keyword else ""
            mode = "Blank" if template == "Blend" else "Variation"
            lines.append({
                "prompt_id": f"{dish_id}:{country}:{template}:kw{slot:02d}",
                "dish_id": dish_id,
                "dish_name": dish_name,
                "country": country,
                "country_mode": mode,
                "keyword": keyword,
                "template_id": template,
                "rendered_text": (f"Create a {kw}Jamaican version of this"
                                  f" recipe: {dish_name}. Title:"),
            })
    with open(path, "w", encoding="utf-8") as fh:
        for line in lines:
            fh.write(json.dumps(line, sort_keys=True) + "\n")
    return lines
