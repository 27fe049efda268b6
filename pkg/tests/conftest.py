import os

import numpy as np
import pytest

from src.models.census import ADULT_SCHEMA, LabelSpec
from src.utils.data_utils import load_dataset

FIRST_ADULT_ROW = (
    "39, State-gov, 77516, Bachelors, 13, Never-married, Adm-clerical, "
    "Not-in-family, White, Male, 2174, 0, 40, United-States, <=50K"
)

CATEGORIES = {
    "workclass": ["Private", "Self-emp-not-inc", "State-gov", "Local-gov", "?"],
    "education": ["Bachelors", "HS-grad", "Masters", "Some-college", "11th"],
    "marital-status": ["Married-civ-spouse", "Never-married", "Divorced"],
    "occupation": ["Adm-clerical", "Exec-managerial", "Prof-specialty", "Sales", "?"],
    "relationship": ["Husband", "Not-in-family", "Own-child", "Wife"],
    "race": ["White", "Black", "Asian-Pac-Islander"],
    "sex": ["Male", "Female"],
    "native-country": ["United-States", "Mexico", "?"],
}
EDUCATION_NUM = {"Bachelors": 13, "HS-grad": 9, "Masters": 14, "Some-college": 10, "11th": 7}


def synthetic_rows(n, seed=0, with_label=True, test_style=False):
    """
    Census-like rows whose income depends on age, education, marriage and
    capital gain, so boosted trees have something to learn.
    """
    rng = np.random.default_rng(seed)
    lines = []
    for _ in range(n):
        cat = {name: values[rng.integers(len(values))] for name, values in CATEGORIES.items()}
        age = int(rng.integers(17, 80))
        fnlwgt = int(rng.integers(20000, 500000))
        edu_num = EDUCATION_NUM[cat["education"]]
        gain = int(rng.choice([0, 0, 0, 0, 0, 0, 0, 3000, 7688, 15024]))
        loss = int(rng.choice([0, 0, 0, 0, 0, 0, 0, 0, 0, 1902]))
        hours = int(rng.integers(10, 70))

        score = (
            0.04 * (age - 40)
            + 0.35 * (edu_num - 10)
            + (1.2 if cat["marital-status"] == "Married-civ-spouse" else -0.8)
            + (2.5 if gain > 5000 else 0.0)
            + 0.02 * (hours - 40)
            + rng.normal(0.0, 0.6)
        )
        label = ">50K" if score > 0.9 else "<=50K"
        if test_style:
            label += "."

        fields = [
            str(age), cat["workclass"], str(fnlwgt), cat["education"], str(edu_num),
            cat["marital-status"], cat["occupation"], cat["relationship"], cat["race"],
            cat["sex"], str(gain), str(loss), str(hours), cat["native-country"],
        ]
        if with_label:
            fields.append(label)
        lines.append(", ".join(fields))
    return lines


def write_lines(path, lines, header=None):
    with open(path, "w") as f:
        if header:
            f.write(header + "\n")
        for line in lines:
            f.write(line + "\n")
    return str(path)


@pytest.fixture
def data_dir(tmp_path):
    """Directory with adult.data (240 rows) and adult.test (60 rows, UCI test style)."""
    root = tmp_path / "adult"
    root.mkdir()
    write_lines(root / "adult.data", synthetic_rows(240, seed=1))
    write_lines(
        root / "adult.test",
        synthetic_rows(60, seed=2, test_style=True),
        header="|1x3 Cross validator",
    )
    return str(root)


@pytest.fixture
def records(data_dir):
    paths = [os.path.join(data_dir, "adult.data"), os.path.join(data_dir, "adult.test")]
    return load_dataset(paths, ADULT_SCHEMA, LabelSpec())


@pytest.fixture
def out_dir(tmp_path):
    return str(tmp_path / "out")


@pytest.fixture(autouse=True)
def no_env_seed(monkeypatch):
    monkeypatch.delenv("CENSUSBOOST_SEED", raising=False)
