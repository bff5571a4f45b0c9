"""Random valid expression sources for round-trip fuzzing."""
import random

FUNCS1 = ["exp", "log", "sin", "cos", "sqrt", "abs"]
FUNCS2 = ["min", "max"]


def _number(r: random.Random) -> str:
    kind = r.random()
    if kind < 0.4:
        return str(r.randint(0, 99))
    if kind < 0.7:
        return f"{r.uniform(0, 10):.{r.randint(1, 6)}f}"
    if kind < 0.85:
        return f"{r.uniform(1, 9):.3f}e{r.randint(-5, 5)}"
    return "." + str(r.randint(0, 999))


def random_source(r: random.Random, depth: int = 0, names=("x", "y", "a")) -> str:
    """Source text with random spacing, redundant parentheses and chains."""
    sp = lambda: " " * r.choice((0, 0, 1, 2))
    if depth > 4 or r.random() < 0.25:
        return r.choice([_number(r), r.choice(names)])
    roll = r.random()
    if roll < 0.45:
        op = r.choice("+-*/^")
        return f"{random_source(r, depth + 1, names)}{sp()}{op}{sp()}{random_source(r, depth + 1, names)}"
    if roll < 0.6:
        return f"-{sp()}{random_source(r, depth + 1, names)}"
    if roll < 0.75:
        return f"({sp()}{random_source(r, depth + 1, names)}{sp()})"
    if roll < 0.92:
        return f"{r.choice(FUNCS1)}({random_source(r, depth + 1, names)})"
    f = r.choice(FUNCS2)
    return f"{f}({random_source(r, depth + 1, names)},{sp()}{random_source(r, depth + 1, names)})"
