#!/usr/bin/env python3
"""Independent margin oracle: walks a nested JSON model by hand.

Usage: tree_walk.py MODEL.json ROWS.csv
Prints one margin per CSV row with full float precision.
"""
import csv
import json
import sys

FEATURES = ["age", "sex", "bmi", "fasting_glucose", "systolic_bp",
            "family_history", "physical_activity", "smoking"]


def walk(node, row):
    while "leaf" not in node:
        node = node["left"] if row[node["feature"]] < node["threshold"] else node["right"]
    return node["leaf"]


def main():
    with open(sys.argv[1]) as f:
        model = json.load(f)
    with open(sys.argv[2]) as f:
        for record in csv.DictReader(f):
            row = [float(record[name]) for name in FEATURES]
            margin = model["base_margin"]
            for tree in model["trees"]:
                margin += walk(tree, row)
            print(repr(margin))


if __name__ == "__main__":
    main()
