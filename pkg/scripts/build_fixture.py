#!/usr/bin/env python3
"""Build fixtures/walkthrough.json, the scripted-provider fixture for the
restaurant card-swiping walkthrough scenario.

The fixture encodes, in order: spec + synthetic data generation, the
5-task plan, snippet batches for tasks 1-5, the two adaptively added
tasks (bookmark search, visited-on-bookmarks), and the replacement
visited-everywhere task executed after the rollback.
"""

import json
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]

GOAL = (
    "Visualize Yelp restaurants as a card-swiping UI to help users choose "
    "where to eat"
)

SPECIFICATION = """\
A single-page prototype that presents restaurants one at a time as swipeable
cards. Swiping right bookmarks the current restaurant and advances to the
next card; swiping left skips it. A side panel lists all bookmarked
restaurants; each entry can be removed again. Restaurant data comes from a
local data.json file with name, cuisine, rating, and price fields. The page
is plain HTML, CSS, and JavaScript with no build step: index.html, app.js,
and styles.css.
"""

RECORDS = [
    {"id": 1, "name": "Luigi's Trattoria", "cuisine": "Italian", "rating": 4.5, "price": "$$"},
    {"id": 2, "name": "Sakura Sushi", "cuisine": "Japanese", "rating": 4.8, "price": "$$$"},
    {"id": 3, "name": "El Camino Taqueria", "cuisine": "Mexican", "rating": 4.2, "price": "$"},
    {"id": 4, "name": "Golden Dragon", "cuisine": "Chinese", "rating": 4.0, "price": "$$"},
    {"id": 5, "name": "The Burger Joint", "cuisine": "American", "rating": 3.9, "price": "$"},
    {"id": 6, "name": "Chez Marie", "cuisine": "French", "rating": 4.7, "price": "$$$$"},
    {"id": 7, "name": "Bombay Spice", "cuisine": "Indian", "rating": 4.4, "price": "$$"},
    {"id": 8, "name": "Falafel Garden", "cuisine": "Middle Eastern", "rating": 4.3, "price": "$"},
    {"id": 9, "name": "Pho Saigon", "cuisine": "Vietnamese", "rating": 4.6, "price": "$"},
    {"id": 10, "name": "Athens Gyro House", "cuisine": "Greek", "rating": 4.1, "price": "$$"},
]

PLAN_TASKS = [
    {
        "title": "Create the basic HTML structure",
        "description": "index.html with a header and a card area, app.js that "
        "loads data.json and renders the first restaurant card.",
    },
    {
        "title": "Implement swiping functionality",
        "description": "Swipe right to bookmark the current restaurant and "
        "advance, swipe left to skip. Arrow keys stand in for swipes.",
    },
    {
        "title": "Build the bookmark display",
        "description": "A side panel listing every bookmarked restaurant, "
        "updated whenever a bookmark is added.",
    },
    {
        "title": "Handle the unbookmark click event",
        "description": "A remove button on each bookmark entry that takes the "
        "restaurant off the list.",
    },
    {
        "title": "Add styling",
        "description": "styles.css giving the cards, header, and bookmark "
        "panel a clean look.",
    },
]

INDEX_HTML = """\
<!DOCTYPE html>
<html lang="en">
<head>
  <meta charset="utf-8">
  <title>Restaurant Swiper</title>
  <link rel="stylesheet" href="styles.css">
</head>
<body>
  <header>
    <h1>Restaurant Swiper</h1>
  </header>
  <main>
    <section id="card-stack"></section>
  </main>
  <script src="app.js"></script>
</body>
</html>
"""

APP_JS = """\
const state = {
  restaurants: [],
  index: 0,
  bookmarks: [],
};

async function loadRestaurants() {
  const response = await fetch("data.json");
  state.restaurants = await response.json();
  renderCurrentCard();
}

function renderCurrentCard() {
  const stack = document.getElementById("card-stack");
  stack.innerHTML = "";
  const restaurant = state.restaurants[state.index];
  if (!restaurant) {
    stack.textContent = "No more restaurants.";
    return;
  }
  const card = document.createElement("article");
  card.className = "card";
  card.innerHTML = `<h2>${restaurant.name}</h2>
    <p>${restaurant.cuisine} · ${restaurant.price} · ${restaurant.rating}★</p>`;
  stack.appendChild(card);
}

loadRestaurants();
"""

SWIPE_FUNCTIONS = """\
function swipeRight() {
  const restaurant = state.restaurants[state.index];
  if (!restaurant) return;
  state.bookmarks.push(restaurant);
  state.index += 1;
  renderCurrentCard();
}

function swipeLeft() {
  if (state.index < state.restaurants.length) {
    state.index += 1;
  }
  renderCurrentCard();
}

"""

SWIPE_LISTENERS = """\

document.addEventListener("keydown", (event) => {
  if (event.key === "ArrowRight") swipeRight();
  if (event.key === "ArrowLeft") swipeLeft();
});
"""

BOOKMARK_PANEL_HTML = """\
    <section id="bookmark-panel">
      <h2>Bookmarks</h2>
      <ul id="bookmark-list"></ul>
    </section>
"""

RENDER_BOOKMARKS = """\
function renderBookmarks() {
  const list = document.getElementById("bookmark-list");
  list.innerHTML = "";
  for (const restaurant of state.bookmarks) {
    const item = document.createElement("li");
    item.textContent = restaurant.name;
    list.appendChild(item);
  }
}

"""

UNBOOKMARK_FUNCTION = """\
function unbookmark(id) {
  state.bookmarks = state.bookmarks.filter((restaurant) => restaurant.id !== id);
  renderBookmarks();
}

"""

REMOVE_BUTTON = """\
    const removeButton = document.createElement("button");
    removeButton.textContent = "Remove";
    removeButton.addEventListener("click", () => unbookmark(restaurant.id));
    item.appendChild(removeButton);
"""

STYLES_CSS = """\
body {
  font-family: system-ui, sans-serif;
  margin: 0;
  background: #faf7f2;
  color: #222;
}

header {
  background: #d23c3c;
  color: #fff;
  padding: 12px 20px;
}

main {
  display: flex;
  gap: 24px;
  padding: 20px;
}

.card {
  border: 1px solid #ddd;
  border-radius: 12px;
  box-shadow: 0 2px 8px rgba(0, 0, 0, 0.1);
  padding: 16px 20px;
  max-width: 320px;
  background: #fff;
}

#bookmark-panel {
  min-width: 240px;
}

#bookmark-list {
  list-style: none;
  padding: 0;
}

#bookmark-list li {
  display: flex;
  justify-content: space-between;
  gap: 8px;
  padding: 6px 0;
  border-bottom: 1px solid #eee;
}

button {
  border: 1px solid #bbb;
  border-radius: 6px;
  background: #f5f5f5;
  cursor: pointer;
}
"""

SEARCH_INPUT_HTML = (
    '      <input id="bookmark-search" type="search" placeholder="Search bookmarks">\n'
)

SEARCH_QUERY_LINES = """\
  const searchBox = document.getElementById("bookmark-search");
  const query = searchBox ? searchBox.value.trim().toLowerCase() : "";
"""

SEARCH_FILTER_LINE = (
    "    if (query && !restaurant.name.toLowerCase().includes(query)) continue;\n"
)

SEARCH_LISTENER = """\

document.getElementById("bookmark-search").addEventListener("input", renderBookmarks);
"""

MARK_BOOKMARK_VISITED = """\
function markBookmarkVisited(id) {
  const restaurant = state.bookmarks.find((candidate) => candidate.id === id);
  if (restaurant) restaurant.visited = !restaurant.visited;
  renderBookmarks();
}

"""

VISITED_BUTTON_BOOKMARKS = """\
    const visitedButton = document.createElement("button");
    visitedButton.textContent = restaurant.visited ? "Visited ✓" : "Mark visited";
    visitedButton.addEventListener("click", () => markBookmarkVisited(restaurant.id));
    item.appendChild(visitedButton);
"""

VISITED_PANEL_HTML = """\
    <section id="visited-panel">
      <h2>Visited</h2>
      <ul id="visited-list"></ul>
    </section>
"""

MARK_VISITED_FUNCTIONS = """\
function markVisited(id) {
  const restaurant = state.restaurants.find((candidate) => candidate.id === id);
  if (restaurant) restaurant.visited = !restaurant.visited;
  renderCurrentCard();
  renderVisited();
}

function renderVisited() {
  const list = document.getElementById("visited-list");
  list.innerHTML = "";
  for (const restaurant of state.restaurants) {
    if (!restaurant.visited) continue;
    const item = document.createElement("li");
    item.textContent = restaurant.name;
    list.appendChild(item);
  }
}

"""

VISITED_BUTTON_CARD = """\
  const visitedButton = document.createElement("button");
  visitedButton.textContent = restaurant.visited ? "Visited ✓" : "Mark visited";
  visitedButton.addEventListener("click", () => markVisited(restaurant.id));
  card.appendChild(visitedButton);
"""


def snip(sid, kind, file, content, rationale="", match=None, occurrence=None):
    anchor = {"kind": kind, "file": file}
    if match is not None:
        anchor["match"] = match
    if occurrence is not None:
        anchor["occurrence"] = occurrence
    return {"id": sid, "rationale": rationale, "anchor": anchor, "content": content}


EXCHANGES = [
    {
        "kind": "spec",
        "match": "card-swiping",
        "response": {"specification": SPECIFICATION},
    },
    {
        "kind": "data",
        "match": "card-swiping",
        "response": {"records": RECORDS},
    },
    {
        "kind": "plan",
        "match": "card-swiping",
        "response": {"tasks": PLAN_TASKS},
    },
    {
        "kind": "snippets",
        "match": "Create the basic HTML structure",
        "response": {
            "snippets": [
                snip("index-html", "create_file", "index.html", INDEX_HTML,
                     "Page skeleton with the card area."),
                snip("app-js", "create_file", "app.js", APP_JS,
                     "Load data.json and render the first card."),
            ]
        },
    },
    {
        "kind": "snippets",
        "match": "Implement swiping functionality",
        "response": {
            "snippets": [
                snip("swipe-functions", "before_match", "app.js", SWIPE_FUNCTIONS,
                     "Swipe handlers bookmark or skip, then advance.",
                     match="loadRestaurants();"),
                snip("swipe-listeners", "file_end", "app.js", SWIPE_LISTENERS,
                     "Arrow keys stand in for swipe gestures."),
            ]
        },
    },
    {
        "kind": "snippets",
        "match": "Build the bookmark display",
        "response": {
            "snippets": [
                snip("bookmark-panel", "after_match", "index.html", BOOKMARK_PANEL_HTML,
                     "Side panel next to the card stack.",
                     match='    <section id="card-stack"></section>'),
                snip("render-bookmarks", "before_match", "app.js", RENDER_BOOKMARKS,
                     "Render the bookmark list.",
                     match="loadRestaurants();"),
                snip("refresh-on-bookmark", "after_match", "app.js",
                     "  renderBookmarks();\n",
                     "Refresh the panel when a bookmark is added.",
                     match="  state.bookmarks.push(restaurant);"),
            ]
        },
    },
    {
        "kind": "snippets",
        "match": "unbookmark",
        "response": {
            "snippets": [
                snip("unbookmark-function", "before_match", "app.js", UNBOOKMARK_FUNCTION,
                     "Drop a restaurant from the bookmark list.",
                     match="loadRestaurants();"),
                snip("remove-button", "after_match", "app.js", REMOVE_BUTTON,
                     "Remove button on every bookmark entry.",
                     match="    item.textContent = restaurant.name;"),
            ]
        },
    },
    {
        "kind": "snippets",
        "match": "Add styling",
        "response": {
            "snippets": [
                snip("styles-css", "create_file", "styles.css", STYLES_CSS,
                     "Cards, header, and bookmark panel styling."),
            ]
        },
    },
    {
        "kind": "snippets",
        "match": "search in the bookmarks",
        "response": {
            "snippets": [
                snip("search-input", "after_match", "index.html", SEARCH_INPUT_HTML,
                     "Search box in the bookmark panel.",
                     match="      <h2>Bookmarks</h2>"),
                snip("search-query", "after_match", "app.js", SEARCH_QUERY_LINES,
                     "Read the query before rendering.",
                     match='  list.innerHTML = "";'),
                snip("search-filter", "after_match", "app.js", SEARCH_FILTER_LINE,
                     "Skip bookmarks that do not match.",
                     match="  for (const restaurant of state.bookmarks) {"),
                snip("search-listener", "file_end", "app.js", SEARCH_LISTENER,
                     "Re-render while typing."),
            ]
        },
    },
    {
        "kind": "snippets",
        "match": "visited",
        "response": {
            "snippets": [
                snip("mark-bookmark-visited", "before_match", "app.js",
                     MARK_BOOKMARK_VISITED,
                     "Toggle visited on a bookmarked restaurant.",
                     match="loadRestaurants();"),
                snip("visited-button-bookmarks", "after_match", "app.js",
                     VISITED_BUTTON_BOOKMARKS,
                     "Visited button on every bookmark entry.",
                     match="    item.appendChild(removeButton);"),
            ]
        },
    },
    {
        "kind": "snippets",
        "match": "any restaurant",
        "response": {
            "snippets": [
                snip("visited-panel", "after_match", "index.html", VISITED_PANEL_HTML,
                     "Panel listing every visited restaurant.",
                     match="    </section>"),
                snip("mark-visited", "before_match", "app.js", MARK_VISITED_FUNCTIONS,
                     "Toggle visited on any restaurant and render the list.",
                     match="loadRestaurants();"),
                snip("visited-button-card", "after_match", "app.js", VISITED_BUTTON_CARD,
                     "Visited button on the current card.",
                     match="  stack.appendChild(card);"),
            ]
        },
    },
]


def main() -> None:
    out = ROOT / "fixtures" / "walkthrough.json"
    out.parent.mkdir(exist_ok=True)
    out.write_text(
        json.dumps({"exchanges": EXCHANGES}, indent=2, ensure_ascii=True) + "\n",
        encoding="utf-8",
    )
    print(f"wrote {out} ({len(EXCHANGES)} exchanges)")


if __name__ == "__main__":
    main()
