// Static entity name pools. Each pool is at least as large as the biggest
// size its classes allow.

pub const ITEMS: &[&str] = &[
    "tent", "stove", "lantern", "rope", "first aid kit", "water filter", "sleeping bag", "camera", "tripod",
    "laptop", "power bank", "radio", "map case", "binoculars", "toolkit", "cooler", "blanket", "headlamp",
    "compass", "raincoat", "notebook", "drone", "telescope", "hammock",
];

pub const PROJECTS: &[&str] = &[
    "warehouse automation", "solar retrofit", "fleet renewal", "data platform", "clinic expansion",
    "training program", "loyalty app", "packaging redesign", "cold storage", "network upgrade",
    "quality audit", "supplier portal", "robotic picking", "water recycling", "market study",
    "security overhaul", "pilot plant", "customer hotline", "route planner", "archive digitisation",
    "sensor rollout", "call center move", "battery storage", "recruiting drive",
];

pub const FACILITIES: &[&str] = &[
    "North Depot", "River Station", "Hill Clinic", "Harbor Office", "Central Hub", "East Kiosk",
    "Lake Center", "Airport Desk", "Mill Branch", "Park Outpost", "South Annex", "Bridge Point",
    "Market Stand", "Station Five", "Valley Post", "Forest Lodge", "Quarry Yard", "Canal House",
];

pub const CITIES: &[&str] = &[
    "Arlen", "Brisk", "Corvale", "Dunmore", "Eastwick", "Fairhold", "Glenport", "Hollis", "Ivybrook",
    "Jarrow", "Kestrel", "Lowden", "Marston", "Northam",
];

pub const WAREHOUSES: &[&str] = &[
    "Plant Alpha", "Plant Beta", "Plant Gamma", "Plant Delta", "Plant Epsilon", "Plant Zeta", "Plant Eta",
];

pub const SHIFTS: &[&str] = &[
    "early shift", "morning shift", "day shift", "split shift", "evening shift", "late shift", "night shift",
];

pub const JUNCTIONS: &[&str] = &[
    "Source Plant", "Pump A", "Pump B", "Valve C", "Relay D", "Hub E", "Node F", "Gate G", "Tank H",
    "Station I", "Link J", "Terminal K", "Outlet L",
];

pub const PRODUCTS: &[&str] = &[
    "chairs", "tables", "shelves", "lamps", "desks", "cabinets", "benches", "stools", "beds", "sofas",
    "mirrors", "racks",
];
