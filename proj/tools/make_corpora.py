#!/usr/bin/env python3
# Copyright 2026 The Uniparse Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the bundled corpora under data/.

    python3 tools/make_corpora.py [--out data]

Output is deterministic. Gold answers are left out of the question files;
evaluation derives them by executing the gold form.
"""

import argparse
import csv
import json
import os
import random

SEED = 2026


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for r in rows:
            f.write(json.dumps(r, sort_keys=True) + "\n")


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")


def split(questions, every=2):
    """Round-robin within each template so both splits see every template."""
    train, test = [], []
    seen = {}
    for q in questions:
        k = seen.get(q["_template"], 0)
        seen[q["_template"]] = k + 1
        (train if k % every == 0 else test).append(q)
    strip = lambda qs: [{k: v for k, v in q.items() if not k.startswith("_")} for q in qs]
    return strip(train), strip(test)


# ---------------------------------------------------------------------------
# Toy knowledge base: films, people, countries.
# ---------------------------------------------------------------------------

COUNTRIES = ["Norway", "Chile", "Japan", "Kenya", "Canada"]
PEOPLE = [
    ("Anna Berg", "Norway", 1961), ("Tomas Reyes", "Chile", 1970), ("Kenji Mori", "Japan", 1958),
    ("Amara Odhiambo", "Kenya", 1975), ("Claire Dubois", "Canada", 1966),
    ("Lars Holm", "Norway", 1980), ("Yuki Tanaka", "Japan", 1984), ("Pablo Vera", "Chile", 1979),
    ("Grace Wanjiru", "Kenya", 1988), ("Owen Tremblay", "Canada", 1972),
    ("Ingrid Sande", "Norway", 1990), ("Hiro Sato", "Japan", 1969),
]
DIRECTORS = ["Anna Berg", "Tomas Reyes", "Kenji Mori", "Amara Odhiambo", "Claire Dubois"]
ACTORS = [p[0] for p in PEOPLE if p[0] not in DIRECTORS]
GENRES = ["drama", "comedy", "thriller", "documentary"]
TITLES = [
    "The Silent River", "Northern Lights", "Paper Lanterns", "Red Dust", "Glass Harbor",
    "Winter Orchard", "The Long Road", "Salt and Stone", "Quiet Thunder", "Iron Meadow",
    "Blue Fjord", "Desert Bloom", "The Last Ferry", "Hidden Valley", "Crimson Tide",
    "Falling Ash", "Morning Tram", "Open Sky", "Broken Compass", "Golden Hour",
]


def ident(prefix, name):
    return prefix + "." + name.lower().replace(" ", "_")


def make_kb(rng):
    triples, names = [], {}
    for c in COUNTRIES:
        cid = ident("m", c)
        names[cid] = c
        cap = ident("m", c + " capital")
        names[cap] = c + " capital city"
        triples.append((cid, "location.country.capital", cap, "entity"))
    people = {}
    for name, country, year in PEOPLE:
        pid = ident("m", name)
        people[name] = pid
        names[pid] = name
        triples.append((pid, "people.person.nationality", ident("m", country), "entity"))
        triples.append((pid, "people.person.birth_year", str(year), "int"))
    genres = {}
    for g in GENRES:
        gid = ident("m.genre", g)
        genres[g] = gid
        names[gid] = g
    films = []
    for i, title in enumerate(TITLES):
        fid = ident("m", title)
        names[fid] = title
        director = DIRECTORS[i % len(DIRECTORS)]
        actors = rng.sample(ACTORS, 2)
        genre = GENRES[rng.randrange(len(GENRES))]
        year = 1990 + (i * 7) % 31
        runtime = 85 + (i * 13) % 70
        films.append(dict(id=fid, title=title, director=director, actors=actors, genre=genre,
                          year=year, runtime=runtime))
        triples.append((fid, "film.film.director", people[director], "entity"))
        for a in actors:
            triples.append((fid, "film.film.actor", people[a], "entity"))
        triples.append((fid, "film.film.genre", genres[genre], "entity"))
        triples.append((fid, "film.film.release_year", str(year), "int"))
        triples.append((fid, "film.film.runtime", str(runtime), "int"))
    return triples, names, films, people


def kb_questions(rng, films, people):
    qs = []

    def add(template, text, gold, mentions):
        qs.append({"_template": template, "id": "", "text": text, "modality": "kb", "gold": gold,
                   "entity_mentions": mentions})

    by_director = {}
    for f in films:
        by_director.setdefault(f["director"], []).append(f)
    by_actor = {}
    for f in films:
        for a in f["actors"]:
            by_actor.setdefault(a, []).append(f)
    nationality = {p[0]: p[1] for p in PEOPLE}

    for f in rng.sample(films, 4):
        add("director_of", "Who is the director of %s?" % f["title"],
            "(JOIN (R film.film.director) %s)" % f["id"], [f["id"]])
    for d in rng.sample(DIRECTORS, 4):
        add("films_by", "Which films have %s as director?" % d,
            "(JOIN film.film.director %s)" % people[d], [people[d]])
    actors = sorted(by_actor)
    for a in rng.sample(actors, 4):
        add("films_with", "Which films feature actor %s?" % a,
            "(JOIN film.film.actor %s)" % people[a], [people[a]])
    for f in rng.sample(films, 4):
        add("director_nationality", "What is the nationality of the director of %s?" % f["title"],
            "(JOIN (R people.person.nationality) (JOIN (R film.film.director) %s))" % f["id"],
            [f["id"]])
    countries = sorted({nationality[d] for d in DIRECTORS})
    for c in rng.sample(countries, 4):
        cid = ident("m", c)
        add("films_by_nationality", "Which films have a director with nationality %s?" % c,
            "(JOIN film.film.director (JOIN people.person.nationality %s))" % cid, [cid])
    for d in rng.sample(DIRECTORS, 4):
        add("count_films", "How many films have %s as director?" % d,
            "(COUNT (JOIN film.film.director %s))" % people[d], [people[d]])
    for d in rng.sample(DIRECTORS, 4):
        add("longest", "Which film with director %s has the longest runtime?" % d,
            "(ARGMAX (JOIN film.film.director %s) film.film.runtime)" % people[d], [people[d]])
    for d in rng.sample(DIRECTORS, 4):
        add("earliest", "Which film with director %s has the earliest release year?" % d,
            "(ARGMIN (JOIN film.film.director %s) film.film.release_year)" % people[d],
            [people[d]])
    pairs = sorted({(a, f["director"]) for f in films for a in f["actors"]})
    for a, d in rng.sample(pairs, 4):
        add("actor_and_director", "Which films feature actor %s and have %s as director?" % (a, d),
            "(AND (JOIN film.film.actor %s) (JOIN film.film.director %s))" % (people[a], people[d]),
            [people[a], people[d]])
    for d in rng.sample(DIRECTORS, 4):
        years = sorted(f["year"] for f in by_director[d])
        y = years[0]
        add("released_after", "Which films with director %s have a release year after %d?" % (d, y),
            "(AND (JOIN film.film.director %s) (GT film.film.release_year %d))" % (people[d], y),
            [people[d]])
    for i, q in enumerate(qs):
        q["id"] = "kb%02d" % i
    return qs


def write_toy_kb(out, rng):
    d = os.path.join(out, "toy_kb")
    os.makedirs(d, exist_ok=True)
    triples, names, films, people = make_kb(rng)
    with open(os.path.join(d, "triples.tsv"), "w", encoding="utf-8", newline="\n") as f:
        for t in triples:
            f.write("\t".join(t) + "\n")
    with open(os.path.join(d, "names.tsv"), "w", encoding="utf-8", newline="\n") as f:
        for k in sorted(names):
            f.write("%s\t%s\n" % (k, names[k]))
    train, test = split(kb_questions(rng, films, people))
    write_jsonl(os.path.join(d, "train.jsonl"), train)
    write_jsonl(os.path.join(d, "test.jsonl"), test)
    write_json(os.path.join(d, "config.json"), {
        "modality": "kb", "dataset": "toy_kb",
        "kb": {"triples": "triples.tsv", "names": "names.tsv"},
        "train": "train.jsonl", "test": "test.jsonl", "run_dir": "run", "seed": 7,
        "bench": {"star": [[5, 7], [30, 40]]},
    })


# ---------------------------------------------------------------------------
# Toy database: departments and their heads.
# ---------------------------------------------------------------------------

DEPARTMENTS = ["Treasury", "Commerce", "Energy", "Education", "Transport", "Justice",
               "Agriculture", "Labor"]
HEADS = [("Kyle", "California", 67), ("Dana", "Alabama", 52), ("Ravi", "Texas", 59),
         ("Lena", "Ohio", 45), ("Marco", "California", 71), ("Sofia", "Texas", 48),
         ("Boris", "Alabama", 63), ("Mina", "Ohio", 56), ("Hugo", "Texas", 69),
         ("Nora", "California", 50)]
DEPT_COLUMNS = [("id", "number"), ("name", "text"), ("creation", "number"),
                ("ranking", "number"), ("budget", "number"), ("employees", "number")]
HEAD_COLUMNS = [("id", "number"), ("name", "text"), ("born_state", "text"), ("age", "number"),
                ("department_id", "number")]


def write_db(d, schema_id, tables):
    os.makedirs(os.path.join(d, "rows"), exist_ok=True)
    schema = {"id": schema_id, "tables": []}
    for name, cols, rows in tables:
        schema["tables"].append({"name": name,
                                 "columns": [{"name": c, "type": t} for c, t in cols]})
        with open(os.path.join(d, "rows", name + ".csv"), "w", encoding="utf-8", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow([c for c, _ in cols])
            for r in rows:
                w.writerow(r)
    write_json(os.path.join(d, "schema.json"), schema)


def toy_db_tables(empty=False):
    depts = []
    for i, name in enumerate(DEPARTMENTS):
        depts.append([i + 1, name, 1789 + i * 23, (i * 5) % 8 + 1, 100 + (i * 37) % 90,
                      1000 + (i * 611) % 5000])
    heads = []
    for i, (name, state, age) in enumerate(HEADS):
        heads.append([i + 1, name, state, age, i % len(DEPARTMENTS) + 1])
    if empty:
        depts, heads = [], []
    return [("department", DEPT_COLUMNS, depts), ("head", HEAD_COLUMNS, heads)]


def db_questions(rng):
    qs = []

    def add(template, text, gold):
        qs.append({"_template": template, "id": "", "text": text, "modality": "db", "gold": gold,
                   "db_id": "department_management"})

    ages = [45, 50, 56, 60, 62, 66]
    for n in rng.sample(ages, 4):
        add("count_older", "How many heads have an age greater than %d?" % n,
            "SELECT COUNT(*) FROM head WHERE head.age > %d" % n)
    for name, _, _ in rng.sample(HEADS, 4):
        add("age_of", "What is the age of the head named %s?" % name,
            "SELECT head.age FROM head WHERE head.name = '%s'" % name)
    words = {"budget": "budget", "ranking": "ranking", "employees": "employees",
             "creation": "creation year"}
    for col in ["budget", "ranking", "employees", "creation"]:
        add("highest", "Which department has the highest %s?" % words[col],
            "SELECT department.name FROM department ORDER BY department.%s DESC LIMIT 1" % col)
    for col in ["employees", "budget", "creation", "ranking"]:
        add("lowest", "Which department has the lowest %s?" % words[col],
            "SELECT department.name FROM department ORDER BY department.%s ASC LIMIT 1" % col)
    for table, col, phrase in [("department", "budget", "budget of departments"),
                               ("head", "age", "age of heads"),
                               ("department", "employees", "employees of departments"),
                               ("department", "ranking", "ranking of departments")]:
        add("average", "What is the average %s?" % phrase,
            "SELECT AVG(%s.%s) FROM %s" % (table, col, table))
    for state in ["California", "Texas", "Ohio", "Alabama"]:
        add("count_state", "How many heads have born state %s?" % state,
            "SELECT COUNT(*) FROM head WHERE head.born_state = '%s'" % state)
    for n in rng.sample(ages, 4):
        add("names_at_least", "List the names of heads with age at least %d." % n,
            "SELECT head.name FROM head WHERE head.age >= %d" % n)
    for (t, a, b, pa, pb) in [("head", "name", "born_state", "name", "born state"),
                              ("head", "name", "age", "name", "age"),
                              ("department", "name", "budget", "name", "budget"),
                              ("department", "name", "ranking", "name", "ranking")]:
        add("two_columns", "Show the %s and %s of all %ss." % (pa, pb, t),
            "SELECT %s.%s, %s.%s FROM %s" % (t, a, t, b, t))
    for (t, col, phrase, noun) in [("head", "born_state", "born state", "heads"),
                                   ("department", "ranking", "ranking", "departments"),
                                   ("head", "age", "age", "heads"),
                                   ("department", "creation", "creation year", "departments")]:
        add("group_count", "How many %s are there for each %s?" % (noun, phrase),
            "SELECT %s.%s, COUNT(*) FROM %s GROUP BY %s.%s" % (t, col, t, t, col))
    for name, _, _ in rng.sample(HEADS, 4):
        add("department_of", "What is the name of the department of the head named %s?" % name,
            "SELECT department.name FROM department JOIN head ON department.id = "
            "head.department_id WHERE head.name = '%s'" % name)
    for i, q in enumerate(qs):
        q["id"] = "db%02d" % i
    return qs


def write_toy_db(out, rng):
    d = os.path.join(out, "toy_db")
    write_db(d, "department_management", toy_db_tables())
    train, test = split(db_questions(rng))
    write_jsonl(os.path.join(d, "train.jsonl"), train)
    write_jsonl(os.path.join(d, "test.jsonl"), test)
    write_json(os.path.join(d, "config.json"), {
        "modality": "db", "dataset": "toy_db",
        "db": {"schema": "schema.json", "rows": "rows"},
        "train": "train.jsonl", "test": "test.jsonl", "run_dir": "run", "seed": 7,
    })


def write_fallback(out):
    """Same schema as the toy database with every table empty, so any
    composed query executes to an empty result."""
    d = os.path.join(out, "fallback")
    write_db(d, "department_management", toy_db_tables(empty=True))
    qs = [
        {"id": "fb00", "text": "How many heads have an age greater than 56?", "modality": "db",
         "gold": "SELECT COUNT(*) FROM head WHERE head.age > 56"},
        {"id": "fb01", "text": "What is the age of the head named Kyle?", "modality": "db",
         "gold": "SELECT head.age FROM head WHERE head.name = 'Kyle'"},
        {"id": "fb02", "text": "Which department has the highest budget?", "modality": "db",
         "gold": "SELECT department.name FROM department ORDER BY department.budget DESC LIMIT 1"},
        {"id": "fb03", "text": "Show the name and age of all heads.", "modality": "db",
         "gold": "SELECT head.name, head.age FROM head"},
    ]
    write_jsonl(os.path.join(d, "test.jsonl"), qs)
    write_json(os.path.join(d, "config.json"), {
        "modality": "db", "dataset": "fallback",
        "db": {"schema": "schema.json", "rows": "rows"},
        "test": "test.jsonl", "run_dir": "run", "seed": 7,
    })


# ---------------------------------------------------------------------------
# Adversarial ranking corpus: tables whose names and columns overlap, and
# values that recur across tables.
# ---------------------------------------------------------------------------

ADV_TABLES = {
    "student": ["name", "city", "age", "score", "fee"],
    "student_club": ["name", "city", "budget", "members", "rank"],
    "student_course": ["name", "credits", "score", "fee", "hours"],
    "teacher": ["name", "city", "age", "salary", "rank"],
    "teacher_course": ["name", "credits", "hours", "salary", "level"],
    "club": ["name", "city", "budget", "members", "level"],
    "course": ["name", "credits", "hours", "level", "fee"],
    "school": ["name", "city", "budget", "rank", "age"],
    "school_club": ["name", "city", "members", "budget", "score"],
    "staff": ["name", "city", "age", "salary", "level"],
    "staff_course": ["name", "hours", "credits", "fee", "rank"],
    "department": ["name", "city", "budget", "members", "rank"],
}
ADV_NAMES = ["Ann", "Bela", "Cato", "Dina", "Emil", "Faye", "Gus", "Hana", "Ivo", "Juno",
             "Kai", "Lia", "Milo", "Nell", "Otto", "Pia"]
ADV_CITIES = ["Lyon", "Porto", "Oslo", "Quito", "Perth", "Cork"]
ADV_TEXT = {"name", "city"}


def adversarial_tables(rng):
    tables = []
    for t, cols in ADV_TABLES.items():
        schema = [(c, "text" if c in ADV_TEXT else "number") for c in cols]
        rows = []
        names = rng.sample(ADV_NAMES, 8)
        for i in range(8):
            row = []
            for c, typ in schema:
                if c == "name":
                    row.append(names[i])
                elif c == "city":
                    row.append(ADV_CITIES[rng.randrange(len(ADV_CITIES))])
                else:
                    row.append(rng.randrange(1, 100))
            rows.append(row)
        tables.append((t, schema, rows))
    return tables


def phrase(table):
    return table.replace("_", " ")


def adversarial_questions(rng, tables):
    qs = []
    data = {t: (schema, rows) for t, schema, rows in tables}
    names = sorted(data)
    kinds = ["value_of", "count_above", "list_column", "city_of", "names_in_city"]
    for i in range(200):
        kind = kinds[i % len(kinds)]
        t = names[rng.randrange(len(names))]
        schema, rows = data[t]
        cols = [c for c, _ in schema]
        numeric = [c for c, typ in schema if typ == "number"]
        if kind == "value_of":
            col = numeric[rng.randrange(len(numeric))]
            name = rows[rng.randrange(len(rows))][0]
            if rng.random() < 0.5:
                text = "What is the %s of %s?" % (col, name)
            else:
                text = "What is the %s of the %s named %s?" % (col, phrase(t), name)
            gold = "SELECT %s.%s FROM %s WHERE %s.name = '%s'" % (t, col, t, t, name)
        elif kind == "count_above":
            col = numeric[rng.randrange(len(numeric))]
            n = rng.randrange(10, 90)
            text = "How many %s entries have %s above %d?" % (phrase(t), col, n)
            gold = "SELECT COUNT(*) FROM %s WHERE %s.%s > %d" % (t, t, col, n)
        elif kind == "list_column":
            col = cols[1 + rng.randrange(len(cols) - 1)]
            text = "List the %s of every %s." % (col, phrase(t))
            gold = "SELECT %s.%s FROM %s" % (t, col, t)
        elif kind == "names_in_city":
            with_city = [n for n in names if "city" in [c for c, _ in data[n][0]]]
            t = with_city[rng.randrange(len(with_city))]
            schema, rows = data[t]
            city = rows[rng.randrange(len(rows))][1]
            text = "List the names of %s entries in %s." % (phrase(t), city)
            gold = "SELECT %s.name FROM %s WHERE %s.city = '%s'" % (t, t, t, city)
        else:
            if "city" not in cols:
                t = "student"
                schema, rows = data[t]
            name = rows[rng.randrange(len(rows))][0]
            text = "Which city is the %s named %s in?" % (phrase(t), name)
            gold = "SELECT %s.city FROM %s WHERE %s.name = '%s'" % (t, t, t, name)
        qs.append({"_template": kind, "id": "adv%03d" % i, "text": text, "modality": "db",
                   "gold": gold, "db_id": "campus"})
    return qs


def write_adversarial(out, rng):
    d = os.path.join(out, "adversarial")
    tables = adversarial_tables(rng)
    write_db(d, "campus", tables)
    qs = adversarial_questions(rng, tables)
    held_out = set(rng.sample(range(len(qs)), 60))
    train, test = [], []
    for i, q in enumerate(qs):
        (test if i in held_out else train).append({k: v for k, v in q.items() if k[0] != "_"})
    write_jsonl(os.path.join(d, "train.jsonl"), train)
    write_jsonl(os.path.join(d, "test.jsonl"), test)
    write_json(os.path.join(d, "config.json"), {
        "modality": "db", "dataset": "adversarial",
        "db": {"schema": "schema.json", "rows": "rows"},
        "train": "train.jsonl", "test": "test.jsonl", "run_dir": "run", "seed": 7,
    })


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    args = ap.parse_args()
    write_toy_kb(args.out, random.Random(SEED))
    write_toy_db(args.out, random.Random(SEED + 1))
    write_fallback(args.out)
    write_adversarial(args.out, random.Random(SEED + 2))


if __name__ == "__main__":
    main()
