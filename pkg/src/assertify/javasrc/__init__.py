"""Java source-handling layer: lexer, method extraction, syntax checking,
and the lightweight compile checker used when no JDK is available."""
