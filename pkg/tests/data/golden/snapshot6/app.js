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

function swipeRight() {
  const restaurant = state.restaurants[state.index];
  if (!restaurant) return;
  state.bookmarks.push(restaurant);
  renderBookmarks();
  state.index += 1;
  renderCurrentCard();
}

function swipeLeft() {
  if (state.index < state.restaurants.length) {
    state.index += 1;
  }
  renderCurrentCard();
}

function renderBookmarks() {
  const list = document.getElementById("bookmark-list");
  list.innerHTML = "";
  const searchBox = document.getElementById("bookmark-search");
  const query = searchBox ? searchBox.value.trim().toLowerCase() : "";
  for (const restaurant of state.bookmarks) {
    if (query && !restaurant.name.toLowerCase().includes(query)) continue;
    const item = document.createElement("li");
    item.textContent = restaurant.name;
    const removeButton = document.createElement("button");
    removeButton.textContent = "Remove";
    removeButton.addEventListener("click", () => unbookmark(restaurant.id));
    item.appendChild(removeButton);
    list.appendChild(item);
  }
}

function unbookmark(id) {
  state.bookmarks = state.bookmarks.filter((restaurant) => restaurant.id !== id);
  renderBookmarks();
}

loadRestaurants();

document.addEventListener("keydown", (event) => {
  if (event.key === "ArrowRight") swipeRight();
  if (event.key === "ArrowLeft") swipeLeft();
});

document.getElementById("bookmark-search").addEventListener("input", renderBookmarks);
