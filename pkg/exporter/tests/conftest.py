import json

import pytest

from xlign_exporter import ExportJob, export_layer_embeddings

NOUNS = [
    ("movie", "फिल्म", "movie"),
    ("phone", "फोन", "phone"),
    ("laptop", "लैपटॉप", "laptop"),
    ("song", "गाना", "song"),
    ("game", "गेम", "game"),
]

TEMPLATES = [
    ("this {w} is really great",
     "यह {w} बहुत अच्छा है",
     "yeh {w} bahut accha hai yaar"),
    ("i did not like the {w} at all",
     "मुझे {w} बिल्कुल पसंद नहीं आया",
     "mujhe {w} bilkul pasand nahi aaya"),
    ("the new {w} works fine",
     "नया {w} ठीक काम करता है",
     "naya {w} theek kaam karta hai"),
    ("my {w} stopped working yesterday",
     "मेरा {w} कल बंद हो गया",
     "mera {w} kal kharab ho gaya"),
    ("everyone is talking about the {w}",
     "सब लोग {w} की बात कर रहे हैं",
     "sab log {w} ki baat kar rahe hain"),
    ("the {w} was a complete waste of money",
     "{w} पैसे की पूरी बर्बादी थी",
     "{w} bilkul paise ki barbadi thi"),
    ("you should try the {w} once",
     "आपको {w} एक बार आज़माना चाहिए",
     "aap {w} ek baar try karo"),
    ("the {w} is better than expected",
     "{w} उम्मीद से बेहतर है",
     "{w} expected se zyada accha hai"),
]


def corpus_rows() -> list[dict]:
    rows = []
    i = 0
    for en_t, hi_t, cm_t in TEMPLATES:
        for en_w, hi_w, cm_w in NOUNS:
            rows.append(
                {
                    "id_en": f"en-{i:03d}", "text_en": en_t.format(w=en_w),
                    "id_hi": f"hi-{i:03d}", "text_hi": hi_t.format(w=hi_w),
                    "id_cm": f"cm-{i:03d}", "text_cm": cm_t.format(w=cm_w),
                }
            )
            i += 1
    return rows


@pytest.fixture(scope="session")
def corpus_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("corpus") / "corpus.json"
    path.write_text(
        json.dumps(corpus_rows(), ensure_ascii=False, indent=1) + "\n",
        encoding="utf-8",
    )
    return path


@pytest.fixture(scope="session")
def toy_export(corpus_path, tmp_path_factory):
    out = tmp_path_factory.mktemp("export")
    job = ExportJob(model_id="toy", corpus_path=corpus_path, out_dir=out)
    return job, export_layer_embeddings(job)
