from app.foundation.search.astar import SearchProblem, SearchResult, astar, brute_force

__all__ = ["SearchProblem", "SearchResult", "astar", "brute_force"]
