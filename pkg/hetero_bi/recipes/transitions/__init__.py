# CLI recipe: config in, profiles and reports out.
