package main

import (
	"context"

	"cloud.google.com/go/firestore"
)

func Handler(ctx context.Context, payload map[string]string) error {
	client, err := firestore.NewClient(ctx, "example-project")
	if err != nil {
		return err
	}
	_, err = client.Collection("events").Doc("latest").Set(ctx, payload)
	return err
}
