"""Embedded label wordlist for the synthetic-ecosystem generator.

Labels are built from common English words plus crypto-flavored compounds so
similarity analysis over synthetic corpora has realistic structure. All entries
are lowercase a-z and at least 5 characters long.
"""

from __future__ import annotations

_BASE_WORDS = [
    "about", "above", "actor", "admin", "after", "agent", "alpha", "amber",
    "angel", "anchor", "apple", "arrow", "artist", "atlas", "autumn", "baker",
    "bamboo", "banana", "basket", "beacon", "beach", "berry", "bishop", "black",
    "blade", "blaze", "block", "bloom", "board", "bonus", "boost", "brave",
    "bread", "breeze", "brick", "bridge", "bright", "brown", "buddy", "buffalo",
    "bullet", "bunker", "butter", "cabin", "cable", "cactus", "candle", "candy",
    "canyon", "captain", "carbon", "cargo", "carpet", "castle", "cedar", "chair",
    "champion", "change", "charge", "chase", "cherry", "chess", "chief", "china",
    "citizen", "clever", "cliff", "clock", "cloud", "clover", "cobalt", "cobra",
    "cocoa", "coffee", "comet", "compass", "copper", "coral", "cosmic", "cotton",
    "county", "cover", "coyote", "crane", "cream", "cricket", "crown", "crystal",
    "cyber", "daisy", "dancer", "delta", "desert", "diamond", "diesel", "digital",
    "dollar", "dolphin", "dragon", "dream", "drift", "eagle", "early", "earth",
    "ember", "empire", "energy", "engine", "fable", "falcon", "family", "fancy",
    "farmer", "feather", "fiber", "field", "finch", "flame", "flash", "fleet",
    "flint", "flora", "flower", "focus", "forest", "forge", "fortune", "fossil",
    "fountain", "foxglove", "frame", "fresh", "frost", "galaxy", "garden", "garnet",
    "ghost", "giant", "ginger", "glacier", "glass", "globe", "golden", "goose",
    "granite", "grape", "gravity", "green", "grove", "guard", "guitar", "habit",
    "hammer", "harbor", "harvest", "hazel", "heart", "heron", "hidden", "hollow",
    "honey", "horizon", "hotel", "house", "hunter", "igloo", "image", "index",
    "indigo", "ironwood", "island", "ivory", "jacket", "jaguar", "jasper", "jewel",
    "joker", "jungle", "juniper", "kayak", "kernel", "kettle", "kingdom", "knight",
    "koala", "lagoon", "lantern", "laser", "launch", "lavender", "leader", "ledger",
    "legend", "lemon", "lemur", "light", "lilac", "linen", "lithium", "lizard",
    "lobster", "locket", "lotus", "lucky", "lunar", "magic", "magnet", "major",
    "mango", "manor", "maple", "marble", "marina", "market", "marvel", "master",
    "matrix", "meadow", "melon", "mercury", "meteor", "metro", "midnight", "mighty",
    "mirror", "mocha", "monarch", "money", "moose", "mosaic", "mountain", "muffin",
    "mulberry", "mustang", "nebula", "nectar", "night", "noble", "nomad", "north",
    "nutmeg", "ocean", "olive", "onion", "opal", "orange", "orbit", "orchid",
    "otter", "oyster", "paddle", "pagoda", "palace", "panda", "panther", "paper",
    "parade", "pearl", "pebble", "pelican", "pepper", "phantom", "phoenix", "pilot",
    "pioneer", "pirate", "pixel", "planet", "plasma", "platinum", "polar", "pollen",
    "poppy", "portal", "prairie", "prism", "puzzle", "python", "quartz", "queen",
    "quiver", "rabbit", "raccoon", "radar", "radio", "rainbow", "ranger", "raven",
    "reef", "relic", "rhino", "ridge", "river", "robot", "rocket", "rogue",
    "royal", "ruby", "saddle", "safari", "saffron", "sailor", "salmon", "sapphire",
    "scarlet", "scout", "sensor", "shadow", "shark", "shelter", "sierra", "signal",
    "silent", "silver", "sketch", "smoke", "solar", "sonic", "sparrow", "spice",
    "spider", "spirit", "spring", "sprout", "squirrel", "stable", "stellar", "stone",
    "storm", "story", "stream", "street", "sugar", "summer", "summit", "sunset",
    "swift", "symbol", "tango", "temple", "thunder", "tiger", "timber", "titan",
    "token", "topaz", "torch", "totem", "tower", "trail", "treasure", "tribe",
    "triton", "trophy", "tulip", "tundra", "tunnel", "turtle", "twilight", "umbrella",
    "unicorn", "valley", "vapor", "velvet", "vertex", "violet", "vision", "volcano",
    "voyage", "walnut", "walrus", "water", "weasel", "whale", "wheat", "willow",
    "window", "winter", "wizard", "wolf", "wonder", "zebra", "zenith", "zephyr",
]

_SUFFIXES = ["coin", "chain", "labs", "club", "world", "house", "works", "swap"]


def _build() -> list[str]:
    words = [w for w in _BASE_WORDS if len(w) >= 5]
    seen = set(words)
    for suffix in _SUFFIXES:
        for base in _BASE_WORDS:
            compound = base + suffix
            if compound not in seen:
                seen.add(compound)
                words.append(compound)
    return words


WORDS: list[str] = _build()
