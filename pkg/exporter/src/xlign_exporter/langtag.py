"""Heuristic word-level language tagging for English/Hindi code-mixed text.

Three rules, applied in order: any Devanagari codepoint tags the word hi;
otherwise a lowercase match against a list of frequent Romanized-Hindi
function and content words tags it hi; otherwise any ASCII letter tags it
en.  Everything else (punctuation, digits, emoji) is other.
"""

from __future__ import annotations

EN = "en"
HI = "hi"
OTHER = "other"

# Romanized-Hindi words common in Hinglish social-media text.  Function
# words dominate on purpose: they are the strongest script-free signal and
# rarely collide with English (loanwords like "main"/"to"/"hi" do collide;
# the list accepts that bias toward hi for code-mixed text).
ROMAN_HI_WORDS = frozenset(
    """
    aap aaj aaya aayi ab abhi acha accha achha agar aur baar baat bahut
    bahar bas bhai bhi bilkul bola bolo bohot chahiye chal chalo dekh dekha
    dekho dil do ek galat gaya gayi ghar haan hai hain ham hamara hamare
    ho hoga hogi hona hota hoti hua hui hum humko hun iska iske isliye jab
    jaisa jaise jao jata jati jo ka kaam kab kaha kahan kaise kar karna
    karo karta karti kaun ke ki kis kitna kiya kiye koi kuch kya kyu kyun
    lagta lagti lekin liya lo log magar maine mat matlab mein mera mere
    meri mila mili milta mujhe na nahi nahin naya nhi paise par pasand pata
    phir pr raha rahe rahi rha sab sabse sahi sath se sirf tab tak tha the
    theek thi thoda to toh tum tumhara uska uske wala wale wali wo woh yaar
    yah yahan ye yeh zyada
    """.split()
)

_DEVANAGARI_LO = "ऀ"
_DEVANAGARI_HI = "ॿ"


def has_devanagari(word: str) -> bool:
    return any(_DEVANAGARI_LO <= ch <= _DEVANAGARI_HI for ch in word)


def tag_word(word: str) -> str:
    if has_devanagari(word):
        return HI
    if word.lower() in ROMAN_HI_WORDS:
        return HI
    if any("a" <= ch.lower() <= "z" for ch in word):
        return EN
    return OTHER
